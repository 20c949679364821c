#pragma once

#include <stdexcept>
#include <string>

namespace fiet {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

// Precondition violations (reducible permutation where an irreducible one is
// required, nonpositive lengths, C <= 1, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class UndecidableComparison : public Error {
public:
    using Error::Error;
};

class MixedField : public Error {
public:
    using Error::Error;
};

class DivisionByZero : public Error {
public:
    using Error::Error;
};

class OutOfDomain : public Error {
public:
    using Error::Error;
};

class ChainMismatch : public Error {
public:
    using Error::Error;
};

class BudgetExceeded : public Error {
public:
    using Error::Error;
};

class MissingAlpha0 : public Error {
public:
    using Error::Error;
};

class GridTooCoarse : public Error {
public:
    using Error::Error;
};

}  // namespace fiet
