#include "obsrobust/report.hpp"

namespace obsrobust {

using nlohmann::json;

json to_json(const Tolerances& tol) {
  return json{{"tol_eig", tol.tol_eig},
              {"tol_rank", tol.tol_rank},
              {"residual_cap", tol.residual_cap},
              {"tol_defect", tol.tol_defect}};
}

json to_json(const RobustnessReport& rep, const EigenStructure* es) {
  json j;
  j["observable"] = rep.observable;
  j["unobservable"] = !rep.observable;
  j["r_min"] = rep.r_min;
  j["F_min"] = rep.f_min.one_based();
  j["eigen_index"] = rep.eigen_index >= 0 ? json(rep.eigen_index + 1) : json(nullptr);
  j["s_robust"] = rep.s_robust;
  j["attack_tolerance"] = rep.attack_tolerance;
  if (rep.r_c_min) j["r_c_min"] = *rep.r_c_min;
  if (rep.f_c_min) j["F_c_min"] = rep.f_c_min->one_based();
  json rows = json::array();
  for (std::size_t i = 0; i < rep.per_eigenvalue.size(); ++i) {
    const EigenvalueResult& e = rep.per_eigenvalue[i];
    json row{{"index", i + 1},
             {"re", e.value.real()},
             {"im", e.value.imag()},
             {"multiplicity", e.multiplicity},
             {"r_i", e.r_i},
             {"F_i", e.removal.one_based()},
             {"wall_ms", e.wall_ms},
             {"layer_sizes", e.layer_sizes}};
    if (rep.r_c_min) row["cost"] = e.cost;
    row["conjugate_of"] = e.conjugate_of >= 0 ? json(e.conjugate_of + 1) : json(nullptr);
    if (es && i < es->pairs.size()) {
      const EigenPair& p = es->pairs[i];
      row["algebraic_count"] = p.algebraic_count;
      row["sigma_kept"] = p.sigma_kept;
      row["sigma_dropped"] = p.sigma_dropped;
      row["residual"] = p.residual;
    }
    rows.push_back(std::move(row));
  }
  j["per_eigenvalue"] = std::move(rows);
  return j;
}

const char* branch_name(Branch b) {
  switch (b) {
    case Branch::reachability:
      return "reachability";
    case Branch::matching:
      return "matching";
    default:
      return "none";
  }
}

json to_json(const StructuralReport& rep) {
  json j;
  j["observable"] = rep.observable;
  j["unobservable"] = !rep.observable;
  j["J_opt"] = rep.j_opt.one_based();
  j["J_opt_size"] = rep.j_opt.size();
  j["J_re"] = rep.j_re.one_based();
  if (rep.j_ma) {
    j["J_ma"] = rep.j_ma->one_based();
    j["J_ma_infinite"] = false;
  } else {
    j["J_ma"] = nullptr;
    j["J_ma_infinite"] = rep.observable;
  }
  j["branch"] = branch_name(rep.branch);
  j["deficiency"] = rep.deficiency;
  j["dm_used"] = rep.dm_used;
  if (rep.dm_used) {
    j["reduced_n"] = rep.reduced_n;
    j["reduced_nonzero_rows"] = rep.reduced_nonzero_rows;
  }
  j["layer_sizes"] = rep.layer_sizes;
  j["wall_ms_reachability"] = rep.wall_ms_reach;
  j["wall_ms_matching"] = rep.wall_ms_matching;
  return j;
}

}  // namespace obsrobust
