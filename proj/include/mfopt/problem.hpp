#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "mfopt/budget.hpp"
#include "mfopt/point.hpp"
#include "mfopt/rng.hpp"

namespace mfopt {

/// Contract for a stochastic simulation oracle exposed at q+1 fidelity
/// levels. Level 0 is the most accurate and expensive model. evaluate() must
/// be a pure function of (point, level, replication): repeated calls with the
/// same arguments replay bit-exactly, and the replication's shared substream
/// is common across levels so outputs are positively correlated (CRN).
class MultiFidelityProblem {
 public:
  virtual ~MultiFidelityProblem() = default;

  virtual std::string name() const = 0;
  virtual int dimension() const = 0;
  virtual int num_levels() const = 0;  // q + 1
  int max_level() const { return num_levels() - 1; }

  virtual const CostVector& costs() const = 0;
  virtual std::optional<Box> bounds() const { return std::nullopt; }

  /// Known optimum (point, objective value), for evaluation only.
  virtual std::optional<std::pair<Point, double>> reference_optimum() const {
    return std::nullopt;
  }

  /// One realization F^level(x, xi). Throws InvalidLevel for level outside
  /// {0..q}.
  virtual double evaluate(const Point& x, FidelityLevel level, const Replication& rep) const = 0;

 protected:
  void check_level(FidelityLevel level) const {
    if (level < 0 || level >= num_levels()) throw InvalidLevel(name() + ": bad fidelity level");
  }
};

/// View restricting a problem to its first `levels` fidelity levels (query
/// streams and values are unchanged, so level-0 behavior is bit-identical to
/// the full problem's).
class LevelRestrictedProblem : public MultiFidelityProblem {
 public:
  LevelRestrictedProblem(std::shared_ptr<const MultiFidelityProblem> inner, int levels)
      : inner_(std::move(inner)), levels_(levels),
        costs_(std::vector<double>(inner_->costs().w.begin(),
                                   inner_->costs().w.begin() + levels)) {
    if (levels < 1 || levels > inner_->num_levels())
      throw InvalidLevel("LevelRestrictedProblem: bad level count");
  }

  std::string name() const override { return inner_->name(); }
  int dimension() const override { return inner_->dimension(); }
  int num_levels() const override { return levels_; }
  const CostVector& costs() const override { return costs_; }
  std::optional<Box> bounds() const override { return inner_->bounds(); }
  std::optional<std::pair<Point, double>> reference_optimum() const override {
    return inner_->reference_optimum();
  }

  double evaluate(const Point& x, FidelityLevel level, const Replication& rep) const override {
    check_level(level);
    return inner_->evaluate(x, level, rep);
  }

 private:
  std::shared_ptr<const MultiFidelityProblem> inner_;
  int levels_;
  CostVector costs_;
};

}  // namespace mfopt
