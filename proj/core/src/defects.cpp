#include "zrplab/defects.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

#include "zrplab/engine.hpp"
#include "zrplab/errors.hpp"

namespace zrplab {

bool on_config_jump(SingleDefect& defect, Site i, bool lower_jumped, bool upper_jumped) {
  if (defect.position != i || !upper_jumped || lower_jumped) {
    return false;
  }
  ++defect.position;
  return true;
}

LabelRegistry::LabelRegistry(std::string id, std::size_t lower, std::size_t upper, Window window,
                             std::int64_t min_label, std::vector<Site> positions)
    : id_(std::move(id)),
      lower_(lower),
      upper_(upper),
      window_(window),
      min_label_(min_label),
      positions_(std::move(positions)),
      top_(window.size() + 1, -1) {
  for (std::size_t k = 0; k < positions_.size(); ++k) {
    auto& top = top_[slot(positions_[k])];
    top = std::max(top, static_cast<std::int64_t>(k));
  }
}

std::size_t LabelRegistry::slot(Site i) const {
  if (i < window_.lo || i > window_.hi + 1) {
    throw std::domain_error("site " + std::to_string(i) + " outside label registry window");
  }
  return static_cast<std::size_t>(i - window_.lo);
}

Site LabelRegistry::site_of(std::int64_t label) const noexcept {
  if (!contains(label)) {
    return kNoSite;
  }
  return positions_[static_cast<std::size_t>(label - min_label_)];
}

std::optional<std::int64_t> LabelRegistry::top_at(Site i) const {
  const auto k = top_[slot(i)];
  if (k < 0) {
    return std::nullopt;
  }
  return min_label_ + k;
}

std::vector<std::int64_t> LabelRegistry::labels_at(Site i) const {
  std::vector<std::int64_t> out;
  for (std::size_t k = 0; k < positions_.size(); ++k) {
    if (positions_[k] == i) {
      out.push_back(min_label_ + static_cast<std::int64_t>(k));
    }
  }
  return out;
}

std::int64_t LabelRegistry::move_top(Site i) {
  const std::size_t s = slot(i);
  if (i > window_.hi) {
    throw InvariantViolation("labels cannot leave the sink");
  }
  const std::int64_t k = top_[s];
  if (k < 0) {
    throw InvariantViolation(id_ + ": no label to move at site " + std::to_string(i));
  }
  const auto ku = static_cast<std::size_t>(k);
  positions_[ku] = i + 1;
  top_[s] = (ku > 0 && positions_[ku - 1] == i) ? k - 1 : -1;
  auto& dest = top_[s + 1];
  if (dest < 0) {
    dest = k;
  } else if (dest < k) {
    throw InvariantViolation(id_ + ": arriving label is not the lowest at site " +
                             std::to_string(i + 1));
  }
  return min_label_ + k;
}

LabelRegistry spawn_labels(const Configuration& lower, const Configuration& upper, LabelRule rule,
                           Site anchor, std::string id, std::size_t lower_index,
                           std::size_t upper_index) {
  if (!(lower.window == upper.window) || !pointwise_le(lower, upper)) {
    throw ConfigError("label spawning needs lower <= upper on a common window");
  }
  const Window w = lower.window;
  std::vector<Site> slots;
  std::int64_t before_anchor = 0;
  std::int64_t at_anchor = 0;
  for (Site i = w.lo; i <= w.hi; ++i) {
    const auto d = upper.counts[w.index(i)] - lower.counts[w.index(i)];
    for (std::int32_t depth = 0; depth < d; ++depth) {
      slots.push_back(i);
    }
    if (i < anchor) {
      before_anchor += d;
    } else if (i == anchor) {
      at_anchor = d;
    }
  }
  for (std::int64_t s = 0; s < upper.sink_count - lower.sink_count; ++s) {
    slots.push_back(w.hi + 1);
  }

  std::int64_t min_label = 0;
  if (!slots.empty()) {
    if (rule == LabelRule::x_style) {
      if (at_anchor == 0) {
        throw ConfigError("no discrepancy at the anchor site " + std::to_string(anchor));
      }
      min_label = -(before_anchor + at_anchor - 1);
    } else {
      if (slots.back() > anchor) {
        throw ConfigError("discrepancy right of the anchor site " + std::to_string(anchor));
      }
      min_label = -static_cast<std::int64_t>(slots.size() - 1);
    }
  }
  return LabelRegistry(std::move(id), lower_index, upper_index, w, min_label, std::move(slots));
}

std::optional<std::int64_t> on_config_jump(LabelRegistry& registry, Site i, bool lower_jumped,
                                           bool upper_jumped) {
  if (!upper_jumped || lower_jumped) {
    return std::nullopt;
  }
  return registry.move_top(i);
}

Site DefectSet::position(const DefectRef& ref) const {
  if (ref.kind == DefectRef::Kind::single) {
    return singles.at(ref.index).position;
  }
  return families.at(ref.index).site_of(ref.label);
}

std::vector<Violation> label_order_audit(const LabelRegistry& registry) {
  std::vector<Violation> out;
  const auto& pos = registry.positions();
  for (std::size_t k = 1; k < pos.size(); ++k) {
    if (pos[k - 1] > pos[k]) {
      const auto label = registry.min_label() + static_cast<std::int64_t>(k);
      out.push_back({"label-order", registry.id() + ": label " + std::to_string(label - 1) +
                                        " at " + std::to_string(pos[k - 1]) + " right of label " +
                                        std::to_string(label) + " at " + std::to_string(pos[k])});
    }
  }
  return out;
}

std::vector<Violation> ordering_audit(const CoupledEnsemble& ensemble) {
  std::vector<Violation> out;
  const Window w = ensemble.window();
  const std::size_t nc = ensemble.num_configs();

  for (std::size_t c = 0; c < nc; ++c) {
    if (ensemble.config(c).total() != ensemble.initial_total(c)) {
      out.push_back({"conservation", "configuration " + std::to_string(c) + " lost particles"});
    }
    if (c + 1 < nc && !pointwise_le(ensemble.config(c), ensemble.config(c + 1))) {
      out.push_back({"pointwise-order", "configurations " + std::to_string(c) + " and " +
                                            std::to_string(c + 1) + " are not ordered"});
    }
  }

  const auto& defects = ensemble.defects();
  for (const auto& d : defects.singles) {
    if (d.position < w.lo || d.position > w.hi + 1) {
      out.push_back({"single-defect", d.id + " left the window"});
      continue;
    }
    if (!d.upper) {
      continue;
    }
    const auto& lo = ensemble.config(d.lower);
    const auto& hi = ensemble.config(*d.upper);
    bool ok = true;
    for (Site i = w.lo; i <= w.hi && ok; ++i) {
      const auto expected = (i == d.position) ? 1 : 0;
      ok = hi.counts[w.index(i)] - lo.counts[w.index(i)] == expected;
    }
    const auto sink_expected = (d.position == w.hi + 1) ? 1 : 0;
    ok = ok && (hi.sink_count - lo.sink_count == sink_expected);
    if (!ok) {
      out.push_back({"single-defect", d.id + " is not the only discrepancy between its pair"});
    }
  }

  for (const auto& family : defects.families) {
    auto order = label_order_audit(family);
    out.insert(out.end(), order.begin(), order.end());
    const auto& lo = ensemble.config(family.lower());
    const auto& hi = ensemble.config(family.upper());
    std::vector<std::int64_t> per_slot(w.size() + 1, 0);
    for (Site p : family.positions()) {
      if (p < w.lo || p > w.hi + 1) {
        out.push_back({"label-consistency", family.id() + ": label outside the window"});
        continue;
      }
      ++per_slot[static_cast<std::size_t>(p - w.lo)];
    }
    bool ok = true;
    for (Site i = w.lo; i <= w.hi && ok; ++i) {
      ok = per_slot[w.index(i)] == hi.counts[w.index(i)] - lo.counts[w.index(i)];
    }
    ok = ok && per_slot[w.size()] == hi.sink_count - lo.sink_count;
    if (!ok) {
      out.push_back({"label-consistency",
                     family.id() + ": label stacks disagree with the discrepancy counts"});
    }
  }

  for (const auto& rel : defects.relations) {
    const Site a = defects.position(rel.left);
    const Site b = defects.position(rel.right);
    if (a != kNoSite && b != kNoSite && a > b) {
      out.push_back({"relation", rel.name + " broken: " + std::to_string(a) + " > " +
                                     std::to_string(b)});
    }
  }
  return out;
}

}  // namespace zrplab
