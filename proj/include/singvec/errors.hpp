#pragma once
/**
 * \file errors.hpp
 * \brief Exception hierarchy shared by all singvec modules.
 */

#include <stdexcept>
#include <string>

namespace singvec {

/** \brief Base class of every singvec error. */
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/** \brief An argument lies outside the domain of an operation. */
class DomainError : public Error {
 public:
  using Error::Error;
};

/** \brief All coordinates of an integer vector vanish. */
class ZeroVector : public DomainError {
 public:
  ZeroVector() : DomainError("zero vector") {}
};

/** \brief A lattice vector is not primitive in the required basis. */
class NotPrimitive : public DomainError {
 public:
  using DomainError::DomainError;
};

/** \brief A certified comparison could not be decided within the precision budget. */
class TieBreak : public Error {
 public:
  using Error::Error;
};

/** \brief A target enclosure is too wide to certify the requested records. */
class EnclosureTooCoarse : public Error {
 public:
  using Error::Error;
};

/** \brief Construction parameters admit no node at the requested height. */
class HeightTooSmall : public Error {
 public:
  using Error::Error;
};

/** \brief A node or edge failed a certified invariant. */
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/** \brief A work budget was exhausted. */
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/** \brief Fewer than two usable scales in a box-counting request. */
class DegenerateScales : public DomainError {
 public:
  using DomainError::DomainError;
};

/** \brief The tree is too shallow for the requested statistic. */
class DepthInsufficient : public DomainError {
 public:
  using DomainError::DomainError;
};

/** \brief A branch path that does not resolve to a tree node. */
class EmptyPath : public DomainError {
 public:
  using DomainError::DomainError;
};

/** \brief Malformed textual input. */
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace singvec
