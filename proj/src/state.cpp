#include "qrep/state.hpp"

#include <algorithm>
#include <charconv>

#include "qrep/errors.hpp"

namespace qrep {

std::string_view to_string(Model model) {
  return model == Model::CC ? "cc" : "nocc";
}

Model parse_model(std::string_view text) {
  if (text == "nocc") return Model::NoCC;
  if (text == "cc") return Model::CC;
  throw InvalidArgument("unknown model '" + std::string(text) +
                        "' (expected nocc or cc)");
}

Entry Entry::group(int size) {
  if (size < 1 || size > kMaxValue) {
    throw InvalidArgument("group size out of range: " + std::to_string(size));
  }
  return Entry(static_cast<std::uint8_t>(size));
}

Entry Entry::countdown(int ticks) {
  if (ticks < 1 || ticks > kMaxValue) {
    throw InvalidArgument("countdown out of range: " + std::to_string(ticks));
  }
  return Entry(static_cast<std::uint8_t>(kMaxValue + ticks));
}

RepeaterState RepeaterState::all_idle(int segments) {
  RepeaterState s;
  s.codes_.assign(static_cast<std::size_t>(segments), '\0');
  return s;
}

RepeaterState RepeaterState::terminal(int segments) {
  RepeaterState s;
  s.push_back(Entry::group(segments));
  return s;
}

void RepeaterState::push_back(Entry e) {
  codes_.push_back(static_cast<char>(e.code()));
}

int RepeaterState::segments() const {
  int total = 0;
  for (std::size_t i = 0; i < size(); ++i) total += (*this)[i].width();
  return total;
}

bool RepeaterState::is_terminal(int segments) const {
  return size() == 1 && (*this)[0].is_group() && (*this)[0].value() == segments;
}

bool RepeaterState::has_idle() const {
  return codes_.find('\0') != std::string::npos;
}

bool RepeaterState::has_countdown() const {
  return std::any_of(codes_.begin(), codes_.end(), [](char c) {
    return Entry::from_code(static_cast<std::uint8_t>(c)).is_countdown();
  });
}

bool RepeaterState::is_palindrome() const {
  return std::equal(codes_.begin(), codes_.begin() + codes_.size() / 2,
                    codes_.rbegin());
}

std::string RepeaterState::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < size(); ++i) {
    const Entry e = (*this)[i];
    switch (e.kind()) {
      case EntryKind::Idle:
        out += '0';
        break;
      case EntryKind::Group:
        if (e.value() < 10) {
          out += static_cast<char>('0' + e.value());
        } else {
          out += '[' + std::to_string(e.value()) + ']';
        }
        break;
      case EntryKind::Countdown:
        out += '(' + std::to_string(e.value()) + ')';
        break;
    }
  }
  return out;
}

namespace {

int parse_number(std::string_view text, std::size_t& pos, char close) {
  const std::size_t end = text.find(close, pos);
  if (end == std::string_view::npos) {
    throw InvalidArgument("unterminated entry in state '" + std::string(text) +
                          "'");
  }
  int value = 0;
  const auto* first = text.data() + pos;
  const auto* last = text.data() + end;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw InvalidArgument("bad number in state '" + std::string(text) + "'");
  }
  pos = end + 1;
  return value;
}

}  // namespace

RepeaterState RepeaterState::parse(std::string_view text) {
  RepeaterState s;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char c = text[pos];
    if (c == '0') {
      s.push_back(Entry::idle());
      ++pos;
    } else if (c >= '1' && c <= '9') {
      s.push_back(Entry::group(c - '0'));
      ++pos;
    } else if (c == '[') {
      ++pos;
      s.push_back(Entry::group(parse_number(text, pos, ']')));
    } else if (c == '(') {
      ++pos;
      s.push_back(Entry::countdown(parse_number(text, pos, ')')));
    } else {
      throw InvalidArgument("unexpected character '" + std::string(1, c) +
                            "' in state '" + std::string(text) + "'");
    }
  }
  if (s.size() == 0) throw InvalidArgument("empty state string");
  return s;
}

RepeaterState mirror(const RepeaterState& state) {
  RepeaterState out;
  for (std::size_t i = state.size(); i-- > 0;) out.push_back(state[i]);
  return out;
}

RepeaterState canonicalize(const RepeaterState& state) {
  RepeaterState m = mirror(state);
  return m < state ? m : state;
}

void validate(const RepeaterState& state, int segments, Model model) {
  if (state.segments() != segments) {
    throw InvalidArgument("state '" + state.to_string() + "' covers " +
                          std::to_string(state.segments()) +
                          " segments, expected " + std::to_string(segments));
  }
  if (model == Model::NoCC && state.has_countdown()) {
    throw InvalidArgument("countdown entries are only valid in the cc model: '" +
                          state.to_string() + "'");
  }
}

}  // namespace qrep
