#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reach/vector_set.hpp"

namespace reach {

/**
 * Hyperparameters of a Grow-When-Required network.
 *
 * Defaults are the values used for every map in the reaching experiments;
 * only the two growth thresholds and the neuron cap differ per map.
 */
struct GwrParams {
    int epochs = 40;
    int max_age = 5;
    int max_neurons = 6000;
    double eps_b = 0.5;   ///< BMU learning rate
    double eps_n = 0.01;  ///< neighbour learning rate
    double tau_b = 0.3;   ///< BMU habituation rate
    double tau_n = 0.1;   ///< neighbour habituation rate
    double activity_threshold = 0.5;
    double habituation_threshold = 0.7;

    /// Throws InvalidArgument if any documented constraint is violated.
    void validate() const;

    static GwrParams with_thresholds(double activity, double habituation, int max_neurons = 6000);

    bool operator==(const GwrParams&) const = default;
};

/// Fixed point of the habituation update: h* = 1 - 1/1.05.
inline constexpr double kHabituationFixedPoint = 1.0 - 1.0 / 1.05;

/// One habituation update of h with rate tau, clamped to [0, 1].
double habituation_update(double h, double tau);

struct Neighbor {
    int index;
    int age;
    bool operator==(const Neighbor&) const = default;
};

struct EdgeRecord {
    int a;
    int b;
    int age;
    bool operator==(const EdgeRecord&) const = default;
};

struct BmuPair {
    int best;
    int second;
    double best_distance;
    double second_distance;
};

struct StepReport {
    bool inserted;
    int bmu;          ///< index of the BMU after any pruning in this step
    double distance;  ///< ||x - w_b|| at step entry
};

/// Mean BMU distance per epoch, in input units.
struct TrainTrace {
    std::vector<double> epoch_error;
};

class GwrNetwork {
public:
    /// Two-neuron network seeded from two distinct samples.
    GwrNetwork(int dim, GwrParams params, std::uint64_t seed, std::span<const double> first,
               std::span<const double> second);

    /// Rebuilds a network from explicit state, validating every invariant except isolation.
    static GwrNetwork from_parts(int dim, GwrParams params, std::uint64_t seed, VectorSet weights,
                                 std::vector<double> habituation, const std::vector<EdgeRecord>& edges,
                                 std::uint64_t epochs_trained = 0);

    int dim() const { return dim_; }
    int size() const { return static_cast<int>(habituation_.size()); }
    const GwrParams& params() const { return params_; }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t epochs_trained() const { return epochs_trained_; }

    std::span<const double> weight(int i) const { return weights_[static_cast<std::size_t>(i)]; }
    const VectorSet& weights() const { return weights_; }
    double habituation(int i) const { return habituation_[static_cast<std::size_t>(i)]; }
    const std::vector<Neighbor>& neighbors(int i) const { return adjacency_[static_cast<std::size_t>(i)]; }

    int edge_count() const;
    std::optional<int> edge_age(int a, int b) const;
    std::vector<EdgeRecord> edges() const;

    BmuPair find_bmus(std::span<const double> x) const;

    /// First BMU and its distance to x.
    std::pair<int, double> nearest(std::span<const double> x) const;

    /// First BMU and its activity. Works on single-neuron networks too.
    std::pair<int, double> query_nearest(std::span<const double> x) const;

    /// exp(-||x - w_b||)
    double activity(int b, std::span<const double> x) const;

    /// Habituates b with tau_b and each of its neighbours with tau_n.
    void habituate(int b);

    StepReport train_step(std::span<const double> x);

    /// Runs params().epochs shuffled passes over the dataset.
    TrainTrace train(const VectorSet& data);

    /// Mean BMU distance over a dataset without modifying the network.
    double quantization_error(const VectorSet& data) const;

    /// Replaces the parameters, e.g. when continuing training with another neuron cap.
    void set_params(const GwrParams& params);

    void save(std::ostream& out) const;
    static GwrNetwork load(std::istream& in);
    void save(const std::string& path) const;
    static GwrNetwork load(const std::string& path);

    /// Same parameters, weights, habituation and edge set; adjacency order is ignored.
    bool operator==(const GwrNetwork& other) const;

private:
    GwrNetwork() = default;

    void check_input(std::span<const double> x) const;
    void check_index(int i) const;
    void set_edge(int a, int b, int age);
    void remove_edge(int a, int b);
    int append_neuron(std::span<const double> w, double h);
    void remove_neuron(int k, int& track_a, int& track_b);
    void age_and_prune(int& b, int& fresh);

    int dim_ = 0;
    GwrParams params_;
    std::uint64_t seed_ = 0;
    std::uint64_t epochs_trained_ = 0;
    VectorSet weights_;
    std::vector<double> habituation_;
    std::vector<std::vector<Neighbor>> adjacency_;
};

} // namespace reach
