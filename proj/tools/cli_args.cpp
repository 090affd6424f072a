#include "cli_args.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "uhlmann_lab/errors.hpp"

namespace uhl::cli {

namespace {

class ExpressionParser {
 public:
  explicit ExpressionParser(std::string_view text) : text_(text) {}

  double parse() {
    const double v = expression();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return v;
  }

 private:
  double expression() {
    double v = term();
    for (;;) {
      skip_space();
      if (accept('+')) {
        v += term();
      } else if (accept('-')) {
        v -= term();
      } else {
        return v;
      }
    }
  }

  double term() {
    double v = factor();
    for (;;) {
      skip_space();
      if (accept('*')) {
        v *= factor();
      } else if (accept('/')) {
        const double d = factor();
        if (d == 0.0) fail("division by zero");
        v /= d;
      } else {
        return v;
      }
    }
  }

  double factor() {
    skip_space();
    if (accept('-')) return -factor();
    if (accept('+')) return factor();
    if (accept('(')) {
      const double v = expression();
      skip_space();
      if (!accept(')')) fail("missing ')'");
      return v;
    }
    if (text_.substr(pos_, 2) == "pi") {
      pos_ += 2;
      return pi;
    }
    const std::string rest(text_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) fail("expected a number");
    pos_ += static_cast<std::size_t>(end - rest.c_str());
    return v;
  }

  bool accept(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::InvalidArgument, "cannot parse '" + std::string(text_) + "': " + why);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto at = text.find(sep, start);
    parts.push_back(text.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
    if (at == std::string_view::npos) return parts;
    start = at + 1;
  }
}

}  // namespace

double parse_scalar(std::string_view text) {
  const double v = ExpressionParser(text).parse();
  if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite value '" + std::string(text) + "'");
  return v;
}

bool is_range(std::string_view text) { return text.find(':') != std::string_view::npos; }

Axis parse_axis(std::string_view text, int default_count) {
  const auto parts = split(text, ':');
  if (parts.size() == 1) return Axis::fixed(parse_scalar(parts[0]));
  if (parts.size() > 3) throw Error(ErrorCode::InvalidArgument, "range '" + std::string(text) + "' has too many fields");
  Axis a;
  a.min = parse_scalar(parts[0]);
  a.max = parse_scalar(parts[1]);
  a.count = default_count;
  if (parts.size() == 3) {
    const double n = parse_scalar(parts[2]);
    if (n != std::floor(n) || n > 1e8)
      throw Error(ErrorCode::InvalidArgument, "range count must be an integer in '" + std::string(text) + "'");
    a.count = static_cast<int>(n);
  }
  if (a.count < 2) throw Error(ErrorCode::InvalidArgument, "range '" + std::string(text) + "' needs at least 2 points");
  if (!(a.max > a.min)) throw Error(ErrorCode::InvalidArgument, "range '" + std::string(text) + "' is empty or reversed");
  return a;
}

std::string describe(const Axis& axis) {
  char buf[96];
  if (axis.count == 1) {
    std::snprintf(buf, sizeof buf, "%.17g", axis.min);
  } else {
    std::snprintf(buf, sizeof buf, "%.17g:%.17g:%d", axis.min, axis.max, axis.count);
  }
  return buf;
}

}  // namespace uhl::cli
