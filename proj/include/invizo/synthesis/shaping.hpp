#pragma once

#include <string>
#include <string_view>

namespace invizo::synthesis {

enum class JoiningForm { Isolated, Final, Initial, Medial };

// Contextual shaping interface; swap in a full shaping engine by
// implementing it.
class Shaper {
 public:
  virtual ~Shaper() = default;
  // Logical-order text in, left-to-right display-order code points out.
  virtual std::u32string shape(std::u32string_view logical) const = 0;
};

// Arabic letters mapped to their presentation forms (U+FE70..U+FEFC) by
// joining context, lam-alef ligatures, harakat treated as transparent.
// Display order reverses right-to-left runs while digit runs (with . , / :
// between digits) keep their left-to-right order.
class BasicArabicShaper final : public Shaper {
 public:
  std::u32string shape(std::u32string_view logical) const override;
};

// Joining form of each position of the logical text (non-letters report
// Isolated).
std::u32string contextual_forms(std::u32string_view logical);
JoiningForm joining_form(std::u32string_view logical, std::size_t index);

// Reorders already shaped logical text into display order.
std::u32string visual_order(std::u32string_view shaped_logical);

}  // namespace invizo::synthesis
