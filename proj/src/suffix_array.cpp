#include "hrdc/suffix_array.hpp"

#include <algorithm>

#include "hrdc/error.hpp"

namespace hrdc {

namespace {

using i32 = std::int32_t;

class Sais {
public:
    Sais(const i32* s, i32* sa, i32 n, i32 k) : s_(s), sa_(sa), n_(n), k_(k), t_(n), bkt_(k) {}

    void run() {
        const i32 n = n_;
        if (n == 1) {
            sa_[0] = 0;
            return;
        }
        t_[n - 1] = true;
        t_[n - 2] = false;
        for (i32 i = n - 3; i >= 0; --i) t_[i] = s_[i] < s_[i + 1] || (s_[i] == s_[i + 1] && t_[i + 1]);

        buckets(true);
        std::fill(sa_, sa_ + n, -1);
        for (i32 i = 1; i < n; ++i)
            if (lms(i)) sa_[--bkt_[s_[i]]] = i;
        induce_l();
        induce_s();

        i32 n1 = 0;
        for (i32 i = 0; i < n; ++i)
            if (lms(sa_[i])) sa_[n1++] = sa_[i];
        std::fill(sa_ + n1, sa_ + n, -1);
        i32 names = 0, prev = -1;
        for (i32 i = 0; i < n1; ++i) {
            const i32 pos = sa_[i];
            bool diff = false;
            for (i32 d = 0; d < n; ++d) {
                if (prev == -1 || s_[pos + d] != s_[prev + d] || t_[pos + d] != t_[prev + d]) {
                    diff = true;
                    break;
                }
                if (d > 0 && (lms(pos + d) || lms(prev + d))) break;
            }
            if (diff) {
                ++names;
                prev = pos;
            }
            sa_[n1 + pos / 2] = names - 1;
        }
        for (i32 i = n - 1, j = n - 1; i >= n1; --i)
            if (sa_[i] >= 0) sa_[j--] = sa_[i];

        i32* s1 = sa_ + n - n1;
        i32* sa1 = sa_;
        if (names < n1) {
            Sais(s1, sa1, n1, names).run();
        } else {
            for (i32 i = 0; i < n1; ++i) sa1[s1[i]] = i;
        }

        buckets(true);
        for (i32 i = 1, j = 0; i < n; ++i)
            if (lms(i)) s1[j++] = i;
        for (i32 i = 0; i < n1; ++i) sa1[i] = s1[sa1[i]];
        std::fill(sa_ + n1, sa_ + n, -1);
        for (i32 i = n1 - 1; i >= 0; --i) {
            const i32 j = sa_[i];
            sa_[i] = -1;
            sa_[--bkt_[s_[j]]] = j;
        }
        induce_l();
        induce_s();
    }

private:
    bool lms(i32 i) const { return i > 0 && t_[i] && !t_[i - 1]; }

    void buckets(bool end) {
        std::fill(bkt_.begin(), bkt_.end(), 0);
        for (i32 i = 0; i < n_; ++i) ++bkt_[s_[i]];
        i32 sum = 0;
        for (i32 c = 0; c < k_; ++c) {
            sum += bkt_[c];
            bkt_[c] = end ? sum : sum - bkt_[c];
        }
    }

    void induce_l() {
        buckets(false);
        for (i32 i = 0; i < n_; ++i) {
            const i32 j = sa_[i] - 1;
            if (j >= 0 && !t_[j]) sa_[bkt_[s_[j]]++] = j;
        }
    }

    void induce_s() {
        buckets(true);
        for (i32 i = n_ - 1; i >= 0; --i) {
            const i32 j = sa_[i] - 1;
            if (j >= 0 && t_[j]) sa_[--bkt_[s_[j]]] = j;
        }
    }

    const i32* s_;
    i32* sa_;
    i32 n_;
    i32 k_;
    std::vector<bool> t_;
    std::vector<i32> bkt_;
};

}  // namespace

std::vector<std::int32_t> suffix_array(std::span<const std::int32_t> s, std::int32_t alphabet) {
    require(!s.empty() && s.back() == 0, ErrorCode::InvalidArgument, "input must end with the 0 sentinel");
    require(s.size() < (std::size_t{1} << 31), ErrorCode::InvalidArgument, "input too long");
    std::vector<std::int32_t> sa(s.size());
    Sais(s.data(), sa.data(), static_cast<i32>(s.size()), alphabet).run();
    return sa;
}

}  // namespace hrdc
