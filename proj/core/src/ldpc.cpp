#include "ddlink/ldpc.hpp"

#include "ddlink/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <set>

namespace ddlink::link {

std::vector<uint8_t> crc16_bits(const std::vector<uint8_t>& bits) {
    uint16_t crc = 0xFFFF;
    for (uint8_t bit : bits) {
        const uint16_t top = (crc >> 15) & 1u;
        crc = static_cast<uint16_t>(crc << 1);
        if (top ^ (bit & 1u)) crc ^= 0x1021;
    }
    std::vector<uint8_t> out(16);
    for (int i = 0; i < 16; ++i) out[i] = (crc >> (15 - i)) & 1u;
    return out;
}

LdpcCode::LdpcCode(int n, int k) : n_(n), k_(k), m_(n - k) {
    if (k < 24 || m_ < 8 || k >= n)
        throw ConfigError("LdpcCode: unsupported dimensions n=" + std::to_string(n) + " k=" + std::to_string(k));

    const int wc = 3; // systematic column weight
    Rng rng(derive_seed(0x1d9c0debULL, static_cast<uint64_t>(n), static_cast<uint64_t>(k)));

    std::vector<std::vector<int>> rows(static_cast<size_t>(m_));
    std::vector<int> row_deg(static_cast<size_t>(m_), 0);
    std::set<uint64_t> pairs; // 4-cycle avoidance, best effort

    auto pick_row = [&](const int* chosen, int nchosen) {
        // Sample a few candidates and keep the lightest row, which keeps
        // row weights near-uniform without a full PEG construction.
        int best = -1;
        for (int c = 0; c < 8; ++c) {
            const int r = static_cast<int>(rng.next_u64() % static_cast<uint64_t>(m_));
            bool dup = false;
            for (int j = 0; j < nchosen; ++j) dup |= (chosen[j] == r);
            if (dup) continue;
            if (best < 0 || row_deg[static_cast<size_t>(r)] < row_deg[static_cast<size_t>(best)]) best = r;
        }
        return best;
    };

    for (int col = 0; col < k; ++col) {
        int chosen[wc];
        int got = 0;
        for (int attempt = 0; attempt < 40 && got < wc; ++attempt) {
            const int r = pick_row(chosen, got);
            if (r < 0) continue;
            bool cycle = false;
            for (int j = 0; j < got; ++j) {
                const int a = std::min(chosen[j], r), b = std::max(chosen[j], r);
                if (pairs.count(static_cast<uint64_t>(a) * static_cast<uint64_t>(m_) + b)) cycle = true;
            }
            if (cycle && attempt < 30) continue; // accept late rather than loop forever
            chosen[got++] = r;
        }
        while (got < wc) { // fallback: any distinct rows
            const int r = static_cast<int>(rng.next_u64() % static_cast<uint64_t>(m_));
            bool dup = false;
            for (int j = 0; j < got; ++j) dup |= (chosen[j] == r);
            if (!dup) chosen[got++] = r;
        }
        for (int a = 0; a < wc; ++a) {
            for (int b = a + 1; b < wc; ++b) {
                const int lo = std::min(chosen[a], chosen[b]), hi = std::max(chosen[a], chosen[b]);
                pairs.insert(static_cast<uint64_t>(lo) * static_cast<uint64_t>(m_) + hi);
            }
            rows[static_cast<size_t>(chosen[a])].push_back(col);
            row_deg[static_cast<size_t>(chosen[a])]++;
        }
    }

    // Row 0 carries a single accumulator tap, so it must touch at least one
    // systematic column to be a usable check.
    if (rows[0].empty()) {
        const int col = static_cast<int>(rng.next_u64() % static_cast<uint64_t>(k_));
        rows[0].push_back(col);
        row_deg[0]++;
    }

    row_ptr_.assign(static_cast<size_t>(m_) + 1, 0);
    for (int r = 0; r < m_; ++r) {
        std::sort(rows[static_cast<size_t>(r)].begin(), rows[static_cast<size_t>(r)].end());
        row_ptr_[static_cast<size_t>(r) + 1] = row_ptr_[static_cast<size_t>(r)] + static_cast<int>(rows[static_cast<size_t>(r)].size());
    }
    col_idx_.reserve(static_cast<size_t>(row_ptr_.back()));
    for (int r = 0; r < m_; ++r)
        col_idx_.insert(col_idx_.end(), rows[static_cast<size_t>(r)].begin(), rows[static_cast<size_t>(r)].end());
}

std::vector<uint8_t> LdpcCode::encode(const std::vector<uint8_t>& info) const {
    if (static_cast<int>(info.size()) != k_) throw std::invalid_argument("LdpcCode::encode: info length != k");
    std::vector<uint8_t> cw(static_cast<size_t>(n_));
    std::copy(info.begin(), info.end(), cw.begin());
    // Accumulator back-substitution: p_j = p_{j-1} ^ (H1 row j) . u
    uint8_t prev = 0;
    for (int r = 0; r < m_; ++r) {
        uint8_t t = prev;
        for (int e = row_ptr_[static_cast<size_t>(r)]; e < row_ptr_[static_cast<size_t>(r) + 1]; ++e)
            t ^= info[static_cast<size_t>(col_idx_[static_cast<size_t>(e)])];
        cw[static_cast<size_t>(k_ + r)] = t;
        prev = t;
    }
    return cw;
}

bool LdpcCode::syndrome_ok(const std::vector<uint8_t>& cw) const {
    uint8_t prev = 0;
    for (int r = 0; r < m_; ++r) {
        uint8_t t = prev;
        for (int e = row_ptr_[static_cast<size_t>(r)]; e < row_ptr_[static_cast<size_t>(r) + 1]; ++e)
            t ^= cw[static_cast<size_t>(col_idx_[static_cast<size_t>(e)])];
        if (t != cw[static_cast<size_t>(k_ + r)]) return false;
        prev = cw[static_cast<size_t>(k_ + r)];
    }
    return true;
}

LdpcCode::DecodeResult LdpcCode::decode(const std::vector<double>& llrs, int max_iter) const {
    if (static_cast<int>(llrs.size()) != n_) throw std::invalid_argument("LdpcCode::decode: llr length != n");
    constexpr double kAlpha = 0.8;   // min-sum normalization
    constexpr double kClamp = 60.0;  // LLR saturation

    // Full check rows: H1 columns plus the accumulator taps (k+r and k+r-1).
    const int n_edges = row_ptr_.back() + 2 * m_ - 1;
    std::vector<int> chk_ptr(static_cast<size_t>(m_) + 1, 0);
    std::vector<int> chk_var;
    chk_var.reserve(static_cast<size_t>(n_edges));
    for (int r = 0; r < m_; ++r) {
        for (int e = row_ptr_[static_cast<size_t>(r)]; e < row_ptr_[static_cast<size_t>(r) + 1]; ++e)
            chk_var.push_back(col_idx_[static_cast<size_t>(e)]);
        if (r > 0) chk_var.push_back(k_ + r - 1);
        chk_var.push_back(k_ + r);
        chk_ptr[static_cast<size_t>(r) + 1] = static_cast<int>(chk_var.size());
    }

    std::vector<double> r_msg(chk_var.size(), 0.0);
    std::vector<double> posterior(llrs);
    for (double& v : posterior) v = std::clamp(v, -kClamp, kClamp);
    std::vector<uint8_t> hard(static_cast<size_t>(n_));

    DecodeResult result;
    for (int iter = 1; iter <= max_iter; ++iter) {
        for (int c = 0; c < m_; ++c) {
            const int lo = chk_ptr[static_cast<size_t>(c)];
            const int hi = chk_ptr[static_cast<size_t>(c) + 1];
            double min1 = 1e300, min2 = 1e300;
            int min_pos = -1;
            double sign_all = 1.0;
            for (int e = lo; e < hi; ++e) {
                const double q = posterior[static_cast<size_t>(chk_var[static_cast<size_t>(e)])] - r_msg[static_cast<size_t>(e)];
                r_msg[static_cast<size_t>(e)] = q; // stash q temporarily
                const double a = std::abs(q);
                if (q < 0.0) sign_all = -sign_all;
                if (a < min1) {
                    min2 = min1;
                    min1 = a;
                    min_pos = e;
                } else if (a < min2) {
                    min2 = a;
                }
            }
            for (int e = lo; e < hi; ++e) {
                const double q = r_msg[static_cast<size_t>(e)];
                const double mag = kAlpha * (e == min_pos ? min2 : min1);
                const double sgn = (q < 0.0 ? -sign_all : sign_all);
                const double r_new = sgn * mag;
                r_msg[static_cast<size_t>(e)] = r_new;
                const int v = chk_var[static_cast<size_t>(e)];
                posterior[static_cast<size_t>(v)] = std::clamp(q + r_new, -kClamp, kClamp);
            }
        }
        for (int v = 0; v < n_; ++v) hard[static_cast<size_t>(v)] = posterior[static_cast<size_t>(v)] < 0.0 ? 1 : 0;
        result.iterations = iter;
        if (syndrome_ok(hard)) {
            result.parity_ok = true;
            break;
        }
    }
    result.bits.assign(hard.begin(), hard.begin() + k_);
    return result;
}

const LdpcCode& LdpcCode::cached(int n, int k) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::unique_ptr<LdpcCode>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[{n, k}];
    if (!slot) slot = std::make_unique<LdpcCode>(n, k);
    return *slot;
}

std::vector<uint8_t> encode_block(const std::vector<uint8_t>& info, int n_coded) {
    std::vector<uint8_t> sys = info;
    const std::vector<uint8_t> crc = crc16_bits(info);
    sys.insert(sys.end(), crc.begin(), crc.end());
    const LdpcCode& code = LdpcCode::cached(n_coded, static_cast<int>(sys.size()));
    return code.encode(sys);
}

BlockDecode decode_block(const std::vector<double>& llrs, int k_total, int max_iter) {
    const LdpcCode& code = LdpcCode::cached(static_cast<int>(llrs.size()), k_total);
    LdpcCode::DecodeResult dec = code.decode(llrs, max_iter);
    BlockDecode out;
    out.iterations = dec.iterations;
    out.info.assign(dec.bits.begin(), dec.bits.end() - 16);
    const std::vector<uint8_t> crc = crc16_bits(out.info);
    out.crc_ok = std::equal(crc.begin(), crc.end(), dec.bits.end() - 16);
    return out;
}

} // namespace ddlink::link
