#pragma once

#include <stdexcept>
#include <string>

namespace lesionbox {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// nifti_io
class BadMagic : public Error {
public:
  using Error::Error;
};
class UnsupportedDatatype : public Error {
public:
  using Error::Error;
};
class TruncatedData : public Error {
public:
  using Error::Error;
};
class BadDims : public Error {
public:
  using Error::Error;
};

// labels
class EmptyInstance : public Error {
public:
  using Error::Error;
};

// anchors
class DegenerateGt : public Error {
public:
  using Error::Error;
};

// losses
class BadDistribution : public Error {
public:
  using Error::Error;
};

// phantom
class PlacementFailure : public Error {
public:
  using Error::Error;
};

} // namespace lesionbox
