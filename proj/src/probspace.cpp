#include "randopt/probspace.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "randopt/errors.hpp"

namespace randopt {

std::shared_ptr<const ProbSpace> ProbSpace::make(std::vector<ScenarioId> ids, std::vector<double> weights,
                                                 const std::vector<std::vector<ScenarioId>>& atoms) {
  if (ids.empty()) throw PartitionError("probability space needs at least one scenario");
  if (weights.size() != ids.size()) {
    throw WeightSumError("expected " + std::to_string(ids.size()) + " weights, got " +
                         std::to_string(weights.size()));
  }
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw WeightSumError("weights must be finite and nonnegative");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "weights sum to " << total << ", not 1";
    throw WeightSumError(os.str());
  }

  std::map<ScenarioId, std::size_t> index;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!index.emplace(ids[i], i).second) {
      throw PartitionError("duplicate scenario id " + std::to_string(ids[i]));
    }
  }

  std::vector<std::size_t> owner(ids.size(), SIZE_MAX);
  std::vector<std::vector<ScenarioId>> sorted_atoms;
  for (const auto& atom : atoms) {
    if (atom.empty()) throw PartitionError("atoms must be nonempty");
    auto members = atom;
    std::sort(members.begin(), members.end());
    for (ScenarioId id : members) {
      auto it = index.find(id);
      if (it == index.end()) throw PartitionError("atom references unknown scenario " + std::to_string(id));
      if (owner[it->second] != SIZE_MAX) {
        throw PartitionError("scenario " + std::to_string(id) + " appears in more than one atom");
      }
      owner[it->second] = sorted_atoms.size();
    }
    sorted_atoms.push_back(std::move(members));
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (owner[i] == SIZE_MAX) throw PartitionError("scenario " + std::to_string(ids[i]) + " is in no atom");
  }

  std::sort(sorted_atoms.begin(), sorted_atoms.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });

  std::shared_ptr<ProbSpace> space(new ProbSpace());
  space->atom_of_.assign(ids.size(), 0);
  for (std::size_t a = 0; a < sorted_atoms.size(); ++a) {
    std::vector<std::size_t> members;
    members.reserve(sorted_atoms[a].size());
    for (ScenarioId id : sorted_atoms[a]) {
      const std::size_t s = index.at(id);
      members.push_back(s);
      space->atom_of_[s] = a;
    }
    space->atoms_.push_back(std::move(members));
  }
  space->ids_ = std::move(ids);
  space->weights_ = std::move(weights);
  return space;
}

std::optional<std::size_t> ProbSpace::index_of(ScenarioId id) const {
  auto it = std::find(ids_.begin(), ids_.end(), id);
  if (it == ids_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - ids_.begin());
}

bool same_space(const SpacePtr& a, const SpacePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

void RandomVariableRn::validate() const {
  if (!space) throw DomainMismatch("random variable has no probability space");
  if (values.size() != space->size()) {
    throw DomainMismatch("random variable has " + std::to_string(values.size()) + " values for " +
                         std::to_string(space->size()) + " scenarios");
  }
  const std::size_t n = dimension();
  if (n == 0) throw DomainMismatch("random variable values must have dimension >= 1");
  for (const auto& v : values) {
    if (v.size() != n) throw DomainMismatch("random variable values have inconsistent dimensions");
  }
}

Verdict is_measurable_rv(const ProbSpace& space, const RandomVariableRn& xi, double tol) {
  xi.validate();
  if (!(*xi.space == space)) throw DomainMismatch("random variable is defined on a different space");

  const auto& atoms = space.atoms();
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    const auto& members = atoms[a];
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        const Point& u = xi.values[members[i]];
        const Point& v = xi.values[members[j]];
        for (std::size_t c = 0; c < u.size(); ++c) {
          const double diff = std::abs(u[c] - v[c]);
          // NaN compares false, so a NaN anywhere is never "within tol"
          if (!(diff <= tol)) {
            std::ostringstream os;
            os.precision(17);
            os << "component " << c << " differs within atom: " << u[c] << " vs " << v[c];
            return Verdict::no({a, members[i], members[j], std::nullopt, os.str()});
          }
        }
      }
    }
  }
  return Verdict::yes();
}

}  // namespace randopt
