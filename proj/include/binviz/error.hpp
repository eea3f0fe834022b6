// binviz - binary-to-image conversion and noise augmentation pipeline
// Error types shared by every module

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>

namespace binviz {

/// Base class for all errors raised by binviz.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition or invariant on caller-supplied data was violated.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A filesystem read or write failed.
class IoError : public Error {
 public:
  IoError(std::filesystem::path path, const std::string& what)
      : Error(what + ": " + path.string()), path_(std::move(path)) {}

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

/// A problem with one corpus sample, identified by its id.
class SampleError : public Error {
 public:
  SampleError(std::string id, const std::string& what)
      : Error("sample '" + id + "': " + what), id_(std::move(id)) {}

  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

}  // namespace binviz
