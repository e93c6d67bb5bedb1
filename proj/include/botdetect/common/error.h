#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace botdetect {

// Raised for anything wrong with user-supplied input: files, records,
// labels, config. The CLI maps it to exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Error tied to a specific record of an input file.
class RecordError : public InputError {
 public:
  RecordError(std::string file, std::size_t line, std::string field,
              const std::string& detail)
      : InputError(file + ":" + std::to_string(line) + ": field '" + field +
                   "': " + detail),
        file_(std::move(file)),
        line_(line),
        field_(std::move(field)) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::string file_;
  std::size_t line_;
  std::string field_;
};

}  // namespace botdetect
