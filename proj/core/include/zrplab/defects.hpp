#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "zrplab/configuration.hpp"

namespace zrplab {

class CoupledEnsemble;

inline constexpr Site kNoSite = std::numeric_limits<Site>::min();

/// A single discrepancy between two coupled configurations. With `upper`
/// unset the upper configuration is virtual: config(lower) + delta_position.
struct SingleDefect {
  std::string id;
  std::size_t lower = 0;
  std::optional<std::size_t> upper;
  Site position = 0;

  friend bool operator==(const SingleDefect&, const SingleDefect&) = default;
};

/// Moves the defect one step right when the upper configuration jumped from
/// `i` and the lower one did not. Returns true on a move.
bool on_config_jump(SingleDefect& defect, Site i, bool lower_jumped, bool upper_jumped);

enum class LabelRule {
  x_style,  // topmost origin discrepancy gets label 0
  y_style,  // last discrepancy overall gets label 0, all at or left of the anchor
};

/// Label-ordered family of upper - lower second class particles. Labels form
/// the contiguous range [min_label, max_label]; the sink (window.hi + 1) is a
/// valid position.
class LabelRegistry {
 public:
  LabelRegistry() = default;
  /// Label min_label + k sits at positions[k]. Positions are not required to
  /// be sorted so broken registries can be built for negative controls.
  LabelRegistry(std::string id, std::size_t lower, std::size_t upper, Window window,
                std::int64_t min_label, std::vector<Site> positions);

  [[nodiscard]] const std::string& id() const noexcept { return id_; }
  [[nodiscard]] std::size_t lower() const noexcept { return lower_; }
  [[nodiscard]] std::size_t upper() const noexcept { return upper_; }
  [[nodiscard]] bool empty() const noexcept { return positions_.empty(); }
  [[nodiscard]] std::size_t size() const noexcept { return positions_.size(); }
  [[nodiscard]] std::int64_t min_label() const noexcept { return min_label_; }
  [[nodiscard]] std::int64_t max_label() const noexcept {
    return min_label_ + static_cast<std::int64_t>(positions_.size()) - 1;
  }
  [[nodiscard]] bool contains(std::int64_t label) const noexcept {
    return !empty() && label >= min_label_ && label <= max_label();
  }
  /// Position of `label`, or kNoSite when absent.
  [[nodiscard]] Site site_of(std::int64_t label) const noexcept;
  /// Highest label at site i.
  [[nodiscard]] std::optional<std::int64_t> top_at(Site i) const;
  /// Ascending labels at site i.
  [[nodiscard]] std::vector<std::int64_t> labels_at(Site i) const;
  [[nodiscard]] const std::vector<Site>& positions() const noexcept { return positions_; }

  /// The highest label at i moves to the bottom of the stack at i + 1.
  /// Returns the moved label. Throws InvariantViolation if i holds no label.
  std::int64_t move_top(Site i);

  friend bool operator==(const LabelRegistry&, const LabelRegistry&) = default;

 private:
  [[nodiscard]] std::size_t slot(Site i) const;

  std::string id_;
  std::size_t lower_ = 0;
  std::size_t upper_ = 0;
  Window window_;
  std::int64_t min_label_ = 0;
  std::vector<Site> positions_;
  std::vector<std::int64_t> top_;  // per site slot, label index or -1
};

/// One slot per unit of upper - lower discrepancy, enumerated by (site, depth)
/// with the topmost slot last at each site. x_style: the topmost slot at the
/// anchor is label 0. y_style: the last slot is label 0 and every slot lies
/// at or left of the anchor. Throws ConfigError when lower is not below upper
/// or the anchor rule cannot be met.
LabelRegistry spawn_labels(const Configuration& lower, const Configuration& upper,
                           LabelRule rule, Site anchor = 0, std::string id = "X",
                           std::size_t lower_index = 0, std::size_t upper_index = 1);

/// Moves the top label at i when upper jumped and lower did not. Returns the
/// moved label, if any.
std::optional<std::int64_t> on_config_jump(LabelRegistry& registry, Site i, bool lower_jumped,
                                           bool upper_jumped);

/// A single defect, or a given label of a family.
struct DefectRef {
  enum class Kind { single, label } kind = Kind::single;
  std::size_t index = 0;
  std::int64_t label = 0;

  friend bool operator==(const DefectRef&, const DefectRef&) = default;
};

/// Required ordering position(left) <= position(right).
struct OrderRelation {
  std::string name;
  DefectRef left;
  DefectRef right;

  friend bool operator==(const OrderRelation&, const OrderRelation&) = default;
};

struct DefectSet {
  std::vector<SingleDefect> singles;
  std::vector<LabelRegistry> families;
  std::vector<OrderRelation> relations;

  /// Position of a reference, kNoSite if the label does not exist.
  [[nodiscard]] Site position(const DefectRef& ref) const;

  friend bool operator==(const DefectSet&, const DefectSet&) = default;
};

struct Violation {
  std::string kind;
  std::string detail;
};

/// Full scan of the coupling invariants: pointwise order, conservation,
/// label order and consistency with the discrepancies, single defect
/// consistency, and the declared order relations (Q_a <= X_0, Q_a <= Q^lambda,
/// Y_0 <= Q^(-n)).
std::vector<Violation> ordering_audit(const CoupledEnsemble& ensemble);

/// Label order check on a registry alone.
std::vector<Violation> label_order_audit(const LabelRegistry& registry);

}  // namespace zrplab
