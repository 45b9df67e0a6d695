#pragma once

#include <span>
#include <vector>

namespace pessiq {

/// Probability rows must sum to one within this tolerance.
inline constexpr double kProbabilityTolerance = 1e-12;

enum class PolicyKind { Deterministic, Stochastic };

/// Time-dependent policy over a finite horizon. Both kinds expose the
/// row view pi_h(.|s); a deterministic policy stores its action table too.
class Policy {
public:
    /// table is indexed [h * S + s] and holds action indices in [0, A).
    static Policy deterministic(int H, int S, int A, std::vector<int> table);
    /// probs is indexed [(h * S + s) * A + a]; rows must sum to 1.
    static Policy stochastic(int H, int S, int A, std::vector<double> probs);
    static Policy uniform(int H, int S, int A);
    static Policy constant(int H, int S, int A, int action);

    PolicyKind kind() const { return kind_; }
    bool is_deterministic() const { return kind_ == PolicyKind::Deterministic; }
    int horizon() const { return H_; }
    int states() const { return S_; }
    int actions() const { return A_; }

    /// Only valid for deterministic policies.
    int action(int h, int s) const;
    double prob(int h, int s, int a) const { return probs_[index(h, s) * A_ + a]; }
    std::span<const double> row(int h, int s) const {
        return {probs_.data() + index(h, s) * A_, static_cast<std::size_t>(A_)};
    }
    const std::vector<int>& action_table() const { return actions_; }
    const std::vector<double>& prob_table() const { return probs_; }

    bool same_shape(int H, int S, int A) const { return H_ == H && S_ == S && A_ == A; }

    friend bool operator==(const Policy&, const Policy&) = default;

private:
    Policy(PolicyKind kind, int H, int S, int A) : kind_(kind), H_(H), S_(S), A_(A) {}
    std::size_t index(int h, int s) const { return static_cast<std::size_t>(h) * S_ + s; }

    PolicyKind kind_;
    int H_, S_, A_;
    std::vector<int> actions_;
    std::vector<double> probs_;
};

/// Row-wise lambda * base + (1 - lambda) * other, always stochastic.
Policy mix_policies(const Policy& base, const Policy& other, double lambda);

} // namespace pessiq
