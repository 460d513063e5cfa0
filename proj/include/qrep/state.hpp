#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace qrep {

enum class Model { NoCC, CC };

std::string_view to_string(Model model);
Model parse_model(std::string_view text);

enum class EntryKind : std::uint8_t { Idle, Group, Countdown };

/// One entry of a repeater state.
///
/// Stored as a single byte code whose numeric order is the canonical entry
/// order: Idle < Group(1) < Group(2) < ... < Countdown(1) < Countdown(2) < ...
class Entry {
 public:
  static constexpr int kMaxValue = 63;

  static Entry idle() { return Entry(0); }
  static Entry group(int size);
  static Entry countdown(int ticks);
  static Entry from_code(std::uint8_t code) { return Entry(code); }

  EntryKind kind() const {
    if (code_ == 0) return EntryKind::Idle;
    return code_ <= kMaxValue ? EntryKind::Group : EntryKind::Countdown;
  }
  // Group size or remaining ticks; 0 for Idle.
  int value() const { return code_ <= kMaxValue ? code_ : code_ - kMaxValue; }
  // Segments covered by this entry.
  int width() const { return kind() == EntryKind::Group ? value() : 1; }

  bool is_idle() const { return code_ == 0; }
  bool is_group() const { return kind() == EntryKind::Group; }
  bool is_countdown() const { return kind() == EntryKind::Countdown; }

  std::uint8_t code() const { return code_; }

  friend auto operator<=>(Entry, Entry) = default;

 private:
  explicit Entry(std::uint8_t code) : code_(code) {}
  std::uint8_t code_;
};

/// Ordered sequence of entries describing the chain at one instant.
///
/// Text form: Idle is "0", groups of size < 10 are single digits, larger
/// groups are bracketed ("[12]"), countdowns are parenthesized ("(3)").
class RepeaterState {
 public:
  RepeaterState() = default;

  static RepeaterState all_idle(int segments);
  static RepeaterState terminal(int segments);
  static RepeaterState parse(std::string_view text);

  void push_back(Entry e);

  std::size_t size() const { return codes_.size(); }
  Entry operator[](std::size_t i) const {
    return Entry::from_code(static_cast<std::uint8_t>(codes_[i]));
  }
  // Total number of segments covered.
  int segments() const;

  bool is_terminal(int segments) const;
  bool has_idle() const;
  bool has_countdown() const;
  bool is_palindrome() const;

  std::string to_string() const;
  // Raw byte codes; lexicographic order of these is the canonical order.
  const std::string& codes() const { return codes_; }

  friend bool operator==(const RepeaterState&, const RepeaterState&) = default;
  friend std::strong_ordering operator<=>(const RepeaterState& a,
                                          const RepeaterState& b) {
    return a.codes_ <=> b.codes_;
  }

 private:
  std::string codes_;
};

RepeaterState mirror(const RepeaterState& state);

// Smaller of {state, mirror(state)} in the canonical entry order.
RepeaterState canonicalize(const RepeaterState& state);

// Throws InvalidArgument unless the state covers `segments` segments and
// its entries are well formed for `model`.
void validate(const RepeaterState& state, int segments, Model model);

}  // namespace qrep

template <>
struct std::hash<qrep::RepeaterState> {
  std::size_t operator()(const qrep::RepeaterState& s) const noexcept {
    return std::hash<std::string>{}(s.codes());
  }
};
