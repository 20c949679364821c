#include "fiet/fiet.hpp"

#include "fiet/error.hpp"

namespace fiet {

LengthVector::LengthVector(std::vector<Scalar> values) : values_(std::move(values)) {
    if (values_.empty()) throw InvalidArgument("length vector is empty");
    auto kind = values_.front().kind();
    long d = values_.front().field();
    for (const auto& v : values_) {
        if (v.kind() != kind || v.field() != d)
            throw MixedField("length vector mixes scalar backends");
        if (v.sign() <= 0) throw InvalidArgument("lengths must be strictly positive, got " + v.to_string());
    }
}

Scalar LengthVector::norm() const {
    Scalar sum = values_.front();
    for (std::size_t i = 1; i < values_.size(); ++i) sum += values_[i];
    return sum;
}

Backend LengthVector::backend() const {
    Backend b = backend_of(values_.front());
    for (const auto& v : values_) b.precision = std::max(b.precision, v.precision());
    return b;
}

std::vector<double> LengthVector::to_doubles() const {
    std::vector<double> out;
    out.reserve(values_.size());
    for (const auto& v : values_) out.push_back(v.to_double());
    return out;
}

FlipIET::FlipIET(SignedPermutation perm, LengthVector lengths)
    : perm_(std::move(perm)), lengths_(std::move(lengths)) {
    const std::size_t n = perm_.size();
    if (lengths_.size() != n)
        throw InvalidArgument("permutation has " + std::to_string(n) + " symbols but " +
                              std::to_string(lengths_.size()) + " lengths were given");
    Scalar zero = lengths_.backend().from(Scalar(0L));
    top_offset_.assign(n, zero);
    bottom_offset_.assign(n, zero);
    Scalar acc = zero;
    for (std::size_t i = 0; i < n; ++i) {
        Symbol s = perm_.top_at(i);
        top_offset_[s] = acc;
        acc += lengths_[s];
    }
    total_ = acc;
    acc = zero;
    for (std::size_t i = 0; i < n; ++i) {
        Symbol s = perm_.bottom_at(i);
        bottom_offset_[s] = acc;
        acc += lengths_[s];
    }
    widths_.w.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
        if (perm_.flipped(static_cast<Symbol>(s)))
            widths_.w.push_back(bottom_offset_[s] + lengths_[static_cast<Symbol>(s)] + top_offset_[s]);
        else
            widths_.w.push_back(bottom_offset_[s] - top_offset_[s]);
    }
}

FlipIET FlipIET::canonical() const {
    std::vector<Symbol> relabel;
    auto p = perm_.canonical(&relabel);
    std::vector<Scalar> lengths(size());
    for (std::size_t s = 0; s < size(); ++s) lengths[relabel[s]] = lengths_[static_cast<Symbol>(s)];
    return FlipIET(std::move(p), LengthVector(std::move(lengths)));
}

FlipIET FlipIET::normalized() const {
    std::vector<Scalar> lengths;
    lengths.reserve(size());
    for (const auto& v : lengths_.values()) lengths.push_back(v / total_);
    return FlipIET(perm_, LengthVector(std::move(lengths)));
}

WidthVector widths(const FlipIET& f) { return f.widths(); }

std::optional<Symbol> locate(const FlipIET& f, const Scalar& x) {
    if (x.sign() < 0 || compare(x, f.total()) != Ordering::Less)
        throw OutOfDomain("point " + x.to_string() + " outside [0, " + f.total().to_string() + ")");
    const auto& p = f.perm();
    // Binary search over left endpoints in top order.
    std::size_t lo = 0, hi = p.size();
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (compare(x, f.top_offset(p.top_at(mid))) == Ordering::Less)
            hi = mid;
        else
            lo = mid;
    }
    Symbol s = p.top_at(lo);
    if (compare(x, f.top_offset(s)) == Ordering::Equal) return std::nullopt;
    return s;
}

Scalar apply_branch(const FlipIET& f, Symbol s, const Scalar& x) {
    const Scalar& w = f.widths().w[s];
    return f.perm().flipped(s) ? w - x : x + w;
}

std::optional<Scalar> evaluate(const FlipIET& f, const Scalar& x) {
    auto s = locate(f, x);
    if (!s) return std::nullopt;
    return apply_branch(f, *s, x);
}

FlipIET make_fiet(std::string_view perm_text, const std::vector<std::string>& lengths,
                  const Backend& backend) {
    std::vector<Scalar> values;
    values.reserve(lengths.size());
    for (const auto& t : lengths) values.push_back(backend.read(t));
    return FlipIET(parse_permutation(perm_text), LengthVector(std::move(values)));
}

}  // namespace fiet
