#pragma once

// Intersection drivers shared by every posting-list family.
//
// A cursor type C must provide:
//   std::optional<Value> next();        // advance one element
//   std::optional<Value> seek(Value x); // smallest element >= x at/after the cursor
//   bool probe(Value x);                // seek(x) == x, possibly cheaper
//   std::uint64_t decoded() const;      // instrumentation counter
//
// Each term carries a shift: the driver reports p such that p + shift is in
// the term's list for every term (shift 0 everywhere gives a plain AND).

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hrdc/gap_codecs.hpp"

namespace hrdc {

struct IntersectStats {
    std::uint64_t decoded = 0;   // gaps/codewords decoded from compressed streams
    std::uint64_t expanded = 0;  // non-terminals opened (grammar-based lists)
};

namespace detail {

template <class C>
std::optional<Value> shifted_seek(C& c, Value x, Value shift) {
    auto v = c.seek(x + shift);
    if (!v) return std::nullopt;
    return *v - shift;
}

}  // namespace detail

// Decodes a whole cursor, dropping values that do not survive the shift.
template <class C>
std::vector<Value> drain_shifted(C& cursor, Value shift) {
    std::vector<Value> out;
    while (auto v = cursor.next())
        if (*v > shift) out.push_back(*v - shift);
    return out;
}

// Leapfrog merge: the cursors are visited round-robin, each one advanced to
// the current candidate; a candidate is reported once all of them agree.
template <class C>
std::vector<Value> leapfrog_intersect(std::span<C> cursors, std::span<const Value> shifts) {
    const std::size_t n = cursors.size();
    if (n == 0) return {};
    if (n == 1) return drain_shifted(cursors[0], shifts[0]);
    std::vector<Value> out;
    std::optional<Value> first;
    while ((first = cursors[0].next()) && *first <= shifts[0]) {
    }
    if (!first) return out;
    Value x = *first - shifts[0];
    std::size_t agree = 1;
    std::size_t i = 1;
    while (true) {
        auto v = detail::shifted_seek(cursors[i], x, shifts[i]);
        if (!v) return out;
        if (*v == x) {
            ++agree;
        } else {
            x = *v;
            agree = 1;
        }
        if (agree == n) {
            out.push_back(x);
            v = detail::shifted_seek(cursors[i], x + 1, shifts[i]);
            if (!v) return out;
            x = *v;
            agree = 1;
        }
        i = (i + 1) % n;
    }
}

// Keeps the candidates c with c + shift present in the cursor's list.
template <class C>
std::vector<Value> filter_candidates(std::span<const Value> candidates, C& cursor, Value shift) {
    std::vector<Value> out;
    out.reserve(candidates.size());
    for (Value c : candidates)
        if (cursor.probe(c + shift)) out.push_back(c);
    return out;
}

}  // namespace hrdc
