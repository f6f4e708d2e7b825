#include "popdyn/state.hpp"

#include <cmath>

#include "popdyn/errors.hpp"

namespace popdyn {

void PopulationState::validate() const {
  for (Sex s : kSexes) {
    if (interior[s].size() != grids[s].n()) {
      throw InvalidArgument(std::string("population state: interior length "
                                        "mismatch for sex ") +
                            sex_label(s));
    }
    for (double v : interior[s]) {
      if (!std::isfinite(v)) {
        throw InvalidArgument("population state: non-finite value");
      }
    }
    if (boundary && !std::isfinite((*boundary)[s])) {
      throw InvalidArgument("population state: non-finite boundary value");
    }
  }
}

LatticeFunction PopulationState::lattice(Sex s) const {
  std::vector<double> v;
  v.reserve(interior[s].size() + 1);
  v.push_back(boundary ? (*boundary)[s] : 0.0);
  v.insert(v.end(), interior[s].begin(), interior[s].end());
  return LatticeFunction(grids[s], std::move(v));
}

PopulationState PopulationState::zeros(const SexPair<AgeGrid>& grids,
                                       Units units, double time) {
  PopulationState st;
  st.time = time;
  st.units = units;
  st.grids = grids;
  for (Sex s : kSexes) st.interior[s].assign(grids[s].n(), 0.0);
  st.boundary = SexPair<double>{0.0, 0.0};
  return st;
}

PopulationState PopulationState::from_lattice(const SexPair<LatticeFunction>& f,
                                              Units units, double time) {
  PopulationState st;
  st.time = time;
  st.units = units;
  st.grids = {f.male.grid(), f.female.grid()};
  SexPair<double> b;
  for (Sex s : kSexes) {
    auto in = f[s].interior();
    st.interior[s].assign(in.begin(), in.end());
    b[s] = f[s][0];
  }
  st.boundary = b;
  return st;
}

namespace {

PopulationState rescale(const PopulationState& in,
                        const SexPair<SurvivalCurve>& pi, bool divide) {
  in.validate();
  PopulationState out = in;
  for (Sex s : kSexes) {
    if (!(pi[s].grid() == in.grids[s])) {
      throw InvalidArgument("survival grid does not match state grid");
    }
    for (std::size_t i = 0; i < in.interior[s].size(); ++i) {
      const double w = pi[s][i + 1];
      out.interior[s][i] = divide ? in.interior[s][i] / w : in.interior[s][i] * w;
    }
    if (out.boundary) {
      const double w = pi[s][0];
      (*out.boundary)[s] = divide ? (*in.boundary)[s] / w : (*in.boundary)[s] * w;
    }
  }
  out.units = divide ? Units::transformed : Units::natural;
  return out;
}

}  // namespace

PopulationState to_transformed(const PopulationState& p,
                               const SexPair<SurvivalCurve>& pi) {
  if (p.units != Units::natural) {
    throw InvalidState("to_transformed: state is already in transformed units");
  }
  return rescale(p, pi, true);
}

PopulationState from_transformed(const PopulationState& u,
                                 const SexPair<SurvivalCurve>& pi) {
  if (u.units != Units::transformed) {
    throw InvalidState("from_transformed: state is already in natural units");
  }
  return rescale(u, pi, false);
}

}  // namespace popdyn
