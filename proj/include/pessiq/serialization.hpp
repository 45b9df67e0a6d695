#pragma once

#include <iosfwd>
#include <string>

#include "pessiq/mdp.hpp"
#include "pessiq/policy.hpp"

namespace pessiq {

// {"schema":"tabular-mdp-v1","S","A","H","P":[h][s][a][s'],"r":[h][s][a],"rho":[s]}
std::string mdp_to_json(const TabularMDP& mdp);
/// Rejects unknown schemas, ragged tensors and invalid probabilities.
TabularMDP mdp_from_json(const std::string& text);
void write_mdp(const TabularMDP& mdp, const std::string& path);
TabularMDP read_mdp(const std::string& path);

// {"schema":"policy-v1","kind":"deterministic","table":[h][s]}
// {"schema":"policy-v1","kind":"stochastic","table":[h][s][a]}
std::string policy_to_json(const Policy& pi);
Policy policy_from_json(const std::string& text);
/// Deterministic files do not record A; re-targets such a policy to an
/// action count (throws if any stored action does not fit).
Policy with_action_count(const Policy& pi, int A);
void write_policy(const Policy& pi, const std::string& path);
Policy read_policy(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace pessiq
