#pragma once

#include <stdexcept>
#include <string>

namespace lscd {

// Malformed input files, empty vocabularies, inconsistent configs.
// The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or unwritable files.
class IoError : public DataError {
 public:
  using DataError::DataError;
};

// Parse failure tied to a location in a file.
class ParseError : public DataError {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : DataError(file + ":" + std::to_string(line) + ": " + what),
        file_(file),
        line_(line) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

// Non-finite values, SVD failure, undefined metrics. Exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TrainingDivergence : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace lscd
