#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tachyon {

struct SourceSpan {
  std::size_t offset = 0;
  std::size_t length = 0;
  int line = 0;
  int column = 0;

  // Spans never take part in structural comparison of syntax trees.
  friend bool operator==(const SourceSpan&, const SourceSpan&) { return true; }
};

enum class Severity { Error, Warning };

struct Diagnostic {
  SourceSpan span;
  std::string message;
  Severity severity = Severity::Error;
};

std::string format_diagnostic(const Diagnostic& d, const std::string& file = {});

/// Thrown by semantic passes; collected into diagnostic lists at module boundaries.
class CompileError : public std::runtime_error {
 public:
  CompileError(SourceSpan span, const std::string& message)
      : std::runtime_error(message), span_(span) {}
  const SourceSpan& span() const { return span_; }
  Diagnostic diagnostic() const { return {span_, what(), Severity::Error}; }

 private:
  SourceSpan span_;
};

/// Either a value or the diagnostics explaining why there is none.
template <class T>
struct Parsed {
  std::optional<T> value;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return value.has_value(); }
  const T& operator*() const { return *value; }
  T& operator*() { return *value; }
  const T* operator->() const { return &*value; }
  T* operator->() { return &*value; }
};

}  // namespace tachyon
