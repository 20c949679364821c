#include "fiet/permutation.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "fiet/error.hpp"

namespace fiet {

namespace {

std::vector<std::size_t> inverse_of(const std::vector<Symbol>& row, const char* which) {
    std::vector<std::size_t> inv(row.size(), row.size());
    for (std::size_t i = 0; i < row.size(); ++i) {
        Symbol s = row[i];
        if (s < 0 || static_cast<std::size_t>(s) >= row.size() || inv[s] != row.size())
            throw InvalidArgument(std::string(which) + " row is not a permutation");
        inv[s] = i;
    }
    return inv;
}

std::vector<long> read_integers(std::string_view text) {
    std::vector<long> out;
    std::string buf(text);
    std::istringstream in(buf);
    std::string tok;
    while (in >> tok) {
        char* end = nullptr;
        long v = std::strtol(tok.c_str(), &end, 10);
        if (end == tok.c_str() || *end != '\0') throw ParseError("malformed token '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace

SignedPermutation::SignedPermutation(std::vector<Symbol> top, std::vector<Symbol> bottom,
                                     std::vector<bool> flipped)
    : top_(std::move(top)), bottom_(std::move(bottom)), flipped_(std::move(flipped)) {
    if (top_.size() != bottom_.size() || top_.size() != flipped_.size())
        throw InvalidArgument("permutation rows have different lengths");
    top_pos_ = inverse_of(top_, "top");
    bottom_pos_ = inverse_of(bottom_, "bottom");
}

SignedPermutation SignedPermutation::from_signed(const std::vector<int>& s) {
    const std::size_t n = s.size();
    std::vector<Symbol> top(n);
    std::iota(top.begin(), top.end(), 0);
    std::vector<Symbol> bottom(n, -1);
    std::vector<bool> flipped(n, false);
    for (std::size_t j = 0; j < n; ++j) {
        int v = s[j];
        if (v == 0) throw ParseError("zero entry in signed permutation");
        std::size_t pos = static_cast<std::size_t>(std::abs(v)) - 1;
        if (pos >= n) throw ParseError("entry " + std::to_string(v) + " out of range");
        if (bottom[pos] != -1) throw ParseError("repeated position " + std::to_string(std::abs(v)));
        bottom[pos] = static_cast<Symbol>(j);
        flipped[j] = v < 0;
    }
    return SignedPermutation(std::move(top), std::move(bottom), std::move(flipped));
}

bool SignedPermutation::has_flips() const {
    return std::find(flipped_.begin(), flipped_.end(), true) != flipped_.end();
}

std::size_t SignedPermutation::flip_count() const {
    return static_cast<std::size_t>(std::count(flipped_.begin(), flipped_.end(), true));
}

bool SignedPermutation::top_is_identity() const {
    for (std::size_t i = 0; i < top_.size(); ++i)
        if (top_[i] != static_cast<Symbol>(i)) return false;
    return true;
}

SignedPermutation SignedPermutation::canonical(std::vector<Symbol>* relabel) const {
    const std::size_t n = size();
    std::vector<Symbol> map(n);
    for (std::size_t i = 0; i < n; ++i) map[top_[i]] = static_cast<Symbol>(i);
    std::vector<Symbol> top(n), bottom(n);
    std::vector<bool> flipped(n);
    for (std::size_t i = 0; i < n; ++i) {
        top[i] = static_cast<Symbol>(i);
        bottom[i] = map[bottom_[i]];
        flipped[map[i]] = flipped_[i];
    }
    if (relabel) *relabel = map;
    return SignedPermutation(std::move(top), std::move(bottom), std::move(flipped));
}

std::string SignedPermutation::to_string() const {
    std::ostringstream out;
    const std::size_t n = size();
    if (top_is_identity()) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j) out << ' ';
            long v = static_cast<long>(bottom_pos_[j]) + 1;
            out << (flipped_[j] ? -v : v);
        }
        return out.str();
    }
    for (std::size_t i = 0; i < n; ++i) out << (i ? " " : "") << top_[i] + 1;
    out << " |";
    for (std::size_t i = 0; i < n; ++i) {
        Symbol s = bottom_[i];
        out << ' ' << (flipped_[s] ? "-" : "") << s + 1;
    }
    return out.str();
}

std::uint64_t SignedPermutation::encode() const {
    const std::size_t n = size();
    if (n > 8) return std::hash<std::string>{}(to_string());
    std::uint64_t key = n;
    for (std::size_t i = 0; i < n; ++i) {
        key = (key << 7) | (static_cast<std::uint64_t>(top_[i]) << 4) |
              (static_cast<std::uint64_t>(bottom_[i]) << 1) | (flipped_[i] ? 1u : 0u);
    }
    return key;
}

SignedPermutation parse_permutation(std::string_view text) {
    auto bar = text.find('|');
    if (bar == std::string_view::npos) {
        auto values = read_integers(text);
        if (values.empty()) throw ParseError("empty permutation");
        std::vector<int> s(values.begin(), values.end());
        return SignedPermutation::from_signed(s);
    }
    auto top_vals = read_integers(text.substr(0, bar));
    auto bottom_vals = read_integers(text.substr(bar + 1));
    const std::size_t n = top_vals.size();
    if (n == 0 || bottom_vals.size() != n) throw ParseError("rows of different length");
    std::vector<Symbol> top(n), bottom(n);
    std::vector<bool> flipped(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (top_vals[i] <= 0 || static_cast<std::size_t>(top_vals[i]) > n)
            throw ParseError("top entry out of range");
        if (bottom_vals[i] == 0 || static_cast<std::size_t>(std::labs(bottom_vals[i])) > n)
            throw ParseError("bottom entry out of range");
        top[i] = static_cast<Symbol>(top_vals[i] - 1);
        Symbol s = static_cast<Symbol>(std::labs(bottom_vals[i]) - 1);
        bottom[i] = s;
        flipped[s] = bottom_vals[i] < 0;
    }
    try {
        return SignedPermutation(std::move(top), std::move(bottom), std::move(flipped));
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
}

bool is_irreducible(const SignedPermutation& p) {
    const std::size_t n = p.size();
    std::size_t reach = 0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        reach = std::max(reach, p.bottom_position(p.top_at(k)));
        if (reach == k) return false;
    }
    return true;
}

std::vector<SignedPermutation> all_signed_permutations(std::size_t n) {
    std::vector<SignedPermutation> out;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 1);
    do {
        for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
            std::vector<int> s(n);
            for (std::size_t j = 0; j < n; ++j) s[j] = (mask >> (n - 1 - j)) & 1 ? -order[j] : order[j];
            out.push_back(SignedPermutation::from_signed(s));
        }
    } while (std::next_permutation(order.begin(), order.end()));
    return out;
}

}  // namespace fiet
