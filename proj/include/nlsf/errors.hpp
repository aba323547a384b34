#pragma once

#include <stdexcept>
#include <string>

namespace nlsf {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration: violated (g0)-(g3), bad sector, bad grid parameters.
class ConfigError : public Error {
public:
  using Error::Error;
};

class GridMismatch : public Error {
public:
  GridMismatch() : Error("fields live on different grids") {}
  using Error::Error;
};

/// intG(u) <= 0: the field is outside P, the retraction is undefined.
class NotInP : public Error {
public:
  using Error::Error;
};

/// The field is not on the unit Dirichlet sphere or outside P.
class NotInU : public Error {
public:
  using Error::Error;
};

class LeftDomain : public Error {
public:
  using Error::Error;
};

class MaxIters : public Error {
public:
  using Error::Error;
};

class PositivityUnreachable : public Error {
public:
  using Error::Error;
};

class WindowTooSmall : public Error {
public:
  using Error::Error;
};

class BracketInvalid : public Error {
public:
  using Error::Error;
};

class Stiff : public Error {
public:
  using Error::Error;
};

} // namespace nlsf
