#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fastslow/config.hpp"
#include "fastslow/model.hpp"

namespace fastslow {

struct SourceSpan {
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t begin = 0;  // byte offsets, begin <= end
  std::size_t end = 0;
};

struct Diagnostic {
  SourceSpan span;
  std::string code;  // e.g. "syntax-error", "duplicate-action"
  std::string message;
};

std::string format_diagnostic(const Diagnostic& d, std::string_view file_name = "<input>");

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

/// Parses and validates a model. Throws ParseError carrying every diagnostic found.
SystemDef parse_model(std::string_view text);

/// Canonical text form; parse_model(render_model(s)) == s for every valid s.
std::string render_model(const SystemDef& sys);

/// Parses `fast:`, `slow:`, `delta:` and `alias: X = Y` lines. When `models`
/// is non-empty every delta species must occur in one of them (after aliasing).
EquivConfig parse_config(std::string_view text, std::span<const SystemDef* const> models = {});

std::string render_config(const EquivConfig& cfg);

/// Whether `name` is a valid identifier, including extension names like A{B}.
bool is_identifier(std::string_view name);

}  // namespace fastslow
