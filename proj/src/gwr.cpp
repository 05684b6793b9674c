#include "reach/gwr.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include "reach/binary_io.hpp"
#include "reach/error.hpp"

namespace reach {

namespace {

constexpr char kNetworkMagic[8] = {'G', 'W', 'R', 'N', 'E', 'T', '1', '\0'};
constexpr std::uint32_t kNetworkVersion = 1;

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        sum += d * d;
    }
    return sum;
}

} // namespace

void GwrParams::validate() const {
    if (epochs < 1) throw InvalidArgument("epochs must be >= 1");
    if (max_age < 0) throw InvalidArgument("max_age must be >= 0");
    if (max_neurons < 2) throw InvalidArgument("max_neurons must be >= 2");
    if (!(0.0 < eps_n && eps_n < eps_b && eps_b < 1.0))
        throw InvalidArgument("learning rates must satisfy 0 < eps_n < eps_b < 1");
    if (!(0.0 < tau_n && tau_n < tau_b && tau_b <= 1.0))
        throw InvalidArgument("habituation rates must satisfy 0 < tau_n < tau_b <= 1");
    if (!(activity_threshold > 0.0 && activity_threshold <= 0.9))
        throw InvalidArgument("activity threshold must lie in (0, 0.9]");
    if (!(habituation_threshold > 0.0 && habituation_threshold <= 0.9))
        throw InvalidArgument("habituation threshold must lie in (0, 0.9]");
}

GwrParams GwrParams::with_thresholds(double activity, double habituation, int max_neurons) {
    GwrParams p;
    p.activity_threshold = activity;
    p.habituation_threshold = habituation;
    p.max_neurons = max_neurons;
    return p;
}

double habituation_update(double h, double tau) {
    const double next = h + tau * (1.05 * (1.0 - h) - 1.0);
    return std::clamp(next, 0.0, 1.0);
}

GwrNetwork::GwrNetwork(int dim, GwrParams params, std::uint64_t seed, std::span<const double> first,
                       std::span<const double> second)
    : dim_(dim), params_(params), seed_(seed), weights_(dim) {
    params_.validate();
    if (static_cast<int>(first.size()) != dim || static_cast<int>(second.size()) != dim)
        throw DimensionError("initial samples must have dimension " + std::to_string(dim));
    if (std::equal(first.begin(), first.end(), second.begin()))
        throw InvalidArgument("initial samples must be distinct");
    append_neuron(first, 1.0);
    append_neuron(second, 1.0);
}

GwrNetwork GwrNetwork::from_parts(int dim, GwrParams params, std::uint64_t seed, VectorSet weights,
                                  std::vector<double> habituation, const std::vector<EdgeRecord>& edges,
                                  std::uint64_t epochs_trained) {
    params.validate();
    if (weights.dim() != dim) throw DimensionError("weight table dimension mismatch");
    if (weights.size() != habituation.size()) throw InvalidArgument("weight/habituation count mismatch");
    if (static_cast<int>(habituation.size()) > params.max_neurons)
        throw InvalidArgument("neuron count exceeds max_neurons");
    for (double h : habituation)
        if (!(h >= 0.0 && h <= 1.0)) throw InvalidArgument("habituation outside [0, 1]");

    GwrNetwork net;
    net.dim_ = dim;
    net.params_ = params;
    net.seed_ = seed;
    net.epochs_trained_ = epochs_trained;
    net.weights_ = std::move(weights);
    net.habituation_ = std::move(habituation);
    net.adjacency_.assign(net.habituation_.size(), {});
    for (const auto& e : edges) {
        net.check_index(e.a);
        net.check_index(e.b);
        if (e.a == e.b) throw InvalidArgument("self-loop edge");
        if (e.age < 0) throw InvalidArgument("negative edge age");
        if (net.edge_age(e.a, e.b)) throw InvalidArgument("duplicate edge");
        net.set_edge(e.a, e.b, e.age);
    }
    return net;
}

void GwrNetwork::check_input(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_)
        throw DimensionError("expected input of dimension " + std::to_string(dim_) + ", got " +
                             std::to_string(x.size()));
}

void GwrNetwork::check_index(int i) const {
    if (i < 0 || i >= size()) throw InvalidArgument("neuron index " + std::to_string(i) + " out of range");
}

int GwrNetwork::edge_count() const {
    std::size_t total = 0;
    for (const auto& adj : adjacency_) total += adj.size();
    return static_cast<int>(total / 2);
}

std::optional<int> GwrNetwork::edge_age(int a, int b) const {
    for (const auto& n : adjacency_[static_cast<std::size_t>(a)])
        if (n.index == b) return n.age;
    return std::nullopt;
}

std::vector<EdgeRecord> GwrNetwork::edges() const {
    std::vector<EdgeRecord> out;
    for (int a = 0; a < size(); ++a)
        for (const auto& n : adjacency_[static_cast<std::size_t>(a)])
            if (a < n.index) out.push_back({a, n.index, n.age});
    std::sort(out.begin(), out.end(), [](const EdgeRecord& x, const EdgeRecord& y) {
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    return out;
}

void GwrNetwork::set_edge(int a, int b, int age) {
    auto upsert = [age](std::vector<Neighbor>& adj, int other) {
        for (auto& n : adj)
            if (n.index == other) {
                n.age = age;
                return;
            }
        adj.push_back({other, age});
    };
    upsert(adjacency_[static_cast<std::size_t>(a)], b);
    upsert(adjacency_[static_cast<std::size_t>(b)], a);
}

void GwrNetwork::remove_edge(int a, int b) {
    auto drop = [](std::vector<Neighbor>& adj, int other) {
        std::erase_if(adj, [other](const Neighbor& n) { return n.index == other; });
    };
    drop(adjacency_[static_cast<std::size_t>(a)], b);
    drop(adjacency_[static_cast<std::size_t>(b)], a);
}

int GwrNetwork::append_neuron(std::span<const double> w, double h) {
    weights_.push_back(w);
    habituation_.push_back(h);
    adjacency_.emplace_back();
    return size() - 1;
}

// Swap-removes neuron k; the last neuron takes its index. track_a/track_b
// are rewritten if they referred to the moved neuron.
void GwrNetwork::remove_neuron(int k, int& track_a, int& track_b) {
    const int last = size() - 1;
    for (const auto& n : std::vector<Neighbor>(adjacency_[static_cast<std::size_t>(k)])) remove_edge(k, n.index);
    if (k != last) {
        auto dst = weights_[static_cast<std::size_t>(k)];
        auto src = weights_[static_cast<std::size_t>(last)];
        std::copy(src.begin(), src.end(), dst.begin());
        habituation_[static_cast<std::size_t>(k)] = habituation_[static_cast<std::size_t>(last)];
        adjacency_[static_cast<std::size_t>(k)] = std::move(adjacency_[static_cast<std::size_t>(last)]);
        for (const auto& n : adjacency_[static_cast<std::size_t>(k)])
            for (auto& back : adjacency_[static_cast<std::size_t>(n.index)])
                if (back.index == last) back.index = k;
        if (track_a == last) track_a = k;
        if (track_b == last) track_b = k;
    }
    weights_.pop_back();
    habituation_.pop_back();
    adjacency_.pop_back();
}

BmuPair GwrNetwork::find_bmus(std::span<const double> x) const {
    check_input(x);
    if (size() < 2) throw InvalidArgument("find_bmus needs at least two neurons");
    double best = std::numeric_limits<double>::infinity();
    double second = best;
    int ib = -1;
    int is = -1;
    for (int i = 0; i < size(); ++i) {
        const double d = squared_distance(x, weights_[static_cast<std::size_t>(i)]);
        if (d < best) {
            second = best;
            is = ib;
            best = d;
            ib = i;
        } else if (d < second) {
            second = d;
            is = i;
        }
    }
    return {ib, is, std::sqrt(best), std::sqrt(second)};
}

std::pair<int, double> GwrNetwork::nearest(std::span<const double> x) const {
    check_input(x);
    if (size() == 0) throw InvalidArgument("query on an empty network");
    double best = std::numeric_limits<double>::infinity();
    int ib = 0;
    for (int i = 0; i < size(); ++i) {
        const double d = squared_distance(x, weights_[static_cast<std::size_t>(i)]);
        if (d < best) {
            best = d;
            ib = i;
        }
    }
    return {ib, std::sqrt(best)};
}

std::pair<int, double> GwrNetwork::query_nearest(std::span<const double> x) const {
    const auto [b, distance] = nearest(x);
    return {b, std::exp(-distance)};
}

double GwrNetwork::activity(int b, std::span<const double> x) const {
    check_index(b);
    check_input(x);
    return std::exp(-std::sqrt(squared_distance(x, weight(b))));
}

void GwrNetwork::habituate(int b) {
    check_index(b);
    auto& hb = habituation_[static_cast<std::size_t>(b)];
    hb = habituation_update(hb, params_.tau_b);
    for (const auto& n : adjacency_[static_cast<std::size_t>(b)]) {
        auto& hn = habituation_[static_cast<std::size_t>(n.index)];
        hn = habituation_update(hn, params_.tau_n);
    }
}

void GwrNetwork::age_and_prune(int& b, int& fresh) {
    std::vector<int> dropped;
    for (auto& n : adjacency_[static_cast<std::size_t>(b)]) {
        if (n.index == fresh) continue;
        ++n.age;
        for (auto& back : adjacency_[static_cast<std::size_t>(n.index)])
            if (back.index == b) back.age = n.age;
        if (n.age > params_.max_age) dropped.push_back(n.index);
    }
    if (dropped.empty()) return;
    for (int other : dropped) remove_edge(b, other);

    // b keeps its fresh edge, so only the far endpoints can become isolated.
    std::sort(dropped.begin(), dropped.end(), std::greater<>());
    for (int k : dropped)
        if (adjacency_[static_cast<std::size_t>(k)].empty() && size() > 2) remove_neuron(k, b, fresh);
}

StepReport GwrNetwork::train_step(std::span<const double> x) {
    const BmuPair bmu = find_bmus(x);
    int b = bmu.best;
    const int s = bmu.second;
    set_edge(b, s, 0);

    const double activity_b = std::exp(-bmu.best_distance);
    const double hb = habituation_[static_cast<std::size_t>(b)];
    const bool grow = activity_b < params_.activity_threshold && hb < params_.habituation_threshold &&
                      size() < params_.max_neurons;

    int fresh = s;
    if (grow) {
        std::vector<double> mid(static_cast<std::size_t>(dim_));
        const auto wb = weight(b);
        for (std::size_t k = 0; k < mid.size(); ++k) mid[k] = 0.5 * (wb[k] + x[k]);
        const int r = append_neuron(mid, 1.0);
        set_edge(r, b, 0);
        set_edge(r, s, 0);
        remove_edge(b, s);
        fresh = r;
    } else {
        auto wb = weights_[static_cast<std::size_t>(b)];
        const double rate_b = params_.eps_b * hb;
        for (std::size_t k = 0; k < wb.size(); ++k) wb[k] += rate_b * (x[k] - wb[k]);
        for (const auto& n : adjacency_[static_cast<std::size_t>(b)]) {
            auto wn = weights_[static_cast<std::size_t>(n.index)];
            const double rate_n = params_.eps_n * habituation_[static_cast<std::size_t>(n.index)];
            for (std::size_t k = 0; k < wn.size(); ++k) wn[k] += rate_n * (x[k] - wn[k]);
        }
        habituate(b);
    }

    age_and_prune(b, fresh);
    return {grow, b, bmu.best_distance};
}

TrainTrace GwrNetwork::train(const VectorSet& data) {
    if (data.empty()) throw InvalidArgument("training dataset is empty");
    if (data.dim() != dim_) throw DimensionError("dataset dimension does not match network");

    TrainTrace trace;
    std::vector<std::size_t> order(data.size());
    for (int epoch = 0; epoch < params_.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                          static_cast<std::uint32_t>(epochs_trained_)};
        std::mt19937_64 rng(seq);
        std::shuffle(order.begin(), order.end(), rng);

        double sum = 0.0;
        for (std::size_t i : order) sum += train_step(data[i]).distance;
        trace.epoch_error.push_back(sum / static_cast<double>(data.size()));
        ++epochs_trained_;
    }
    return trace;
}

double GwrNetwork::quantization_error(const VectorSet& data) const {
    if (data.empty()) throw InvalidArgument("dataset is empty");
    double sum = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) sum += nearest(data[i]).second;
    return sum / static_cast<double>(data.size());
}

void GwrNetwork::set_params(const GwrParams& params) {
    params.validate();
    if (size() > params.max_neurons) throw InvalidArgument("network already exceeds the new neuron cap");
    params_ = params;
}

bool GwrNetwork::operator==(const GwrNetwork& other) const {
    return dim_ == other.dim_ && params_ == other.params_ && seed_ == other.seed_ &&
           epochs_trained_ == other.epochs_trained_ && weights_ == other.weights_ &&
           habituation_ == other.habituation_ && edges() == other.edges();
}

void GwrNetwork::save(std::ostream& out) const {
    out.write(kNetworkMagic, 8);
    io::write<std::uint32_t>(out, kNetworkVersion);
    io::write<std::int32_t>(out, dim_);
    io::write<std::int32_t>(out, params_.epochs);
    io::write<std::int32_t>(out, params_.max_age);
    io::write<std::int32_t>(out, params_.max_neurons);
    io::write(out, params_.eps_b);
    io::write(out, params_.eps_n);
    io::write(out, params_.tau_b);
    io::write(out, params_.tau_n);
    io::write(out, params_.activity_threshold);
    io::write(out, params_.habituation_threshold);
    io::write<std::uint64_t>(out, seed_);
    io::write<std::uint64_t>(out, epochs_trained_);

    const auto edge_list = edges();
    io::write<std::uint32_t>(out, static_cast<std::uint32_t>(size()));
    io::write<std::uint32_t>(out, static_cast<std::uint32_t>(edge_list.size()));
    for (int i = 0; i < size(); ++i) {
        for (double w : weight(i)) io::write(out, w);
        io::write(out, habituation(i));
    }
    for (const auto& e : edge_list) {
        io::write<std::int32_t>(out, e.a);
        io::write<std::int32_t>(out, e.b);
        io::write<std::int32_t>(out, e.age);
    }
    if (!out) throw FormatError("failed to write network");
}

GwrNetwork GwrNetwork::load(std::istream& in) {
    io::expect_magic(in, kNetworkMagic);
    if (io::read<std::uint32_t>(in) != kNetworkVersion) throw FormatError("unsupported network version");
    const int dim = io::read<std::int32_t>(in);
    if (dim <= 0 || dim > 4096) throw FormatError("bad network dimension");
    GwrParams p;
    p.epochs = io::read<std::int32_t>(in);
    p.max_age = io::read<std::int32_t>(in);
    p.max_neurons = io::read<std::int32_t>(in);
    p.eps_b = io::read<double>(in);
    p.eps_n = io::read<double>(in);
    p.tau_b = io::read<double>(in);
    p.tau_n = io::read<double>(in);
    p.activity_threshold = io::read<double>(in);
    p.habituation_threshold = io::read<double>(in);
    const auto seed = io::read<std::uint64_t>(in);
    const auto epochs_trained = io::read<std::uint64_t>(in);
    const auto neurons = io::read<std::uint32_t>(in);
    const auto edge_total = io::read<std::uint32_t>(in);

    VectorSet weights(dim);
    std::vector<double> hab;
    std::vector<double> row(static_cast<std::size_t>(dim));
    for (std::uint32_t i = 0; i < neurons; ++i) {
        for (auto& v : row) v = io::read<double>(in);
        weights.push_back(row);
        hab.push_back(io::read<double>(in));
    }
    std::vector<EdgeRecord> edge_list;
    for (std::uint32_t i = 0; i < edge_total; ++i) {
        EdgeRecord e{};
        e.a = io::read<std::int32_t>(in);
        e.b = io::read<std::int32_t>(in);
        e.age = io::read<std::int32_t>(in);
        edge_list.push_back(e);
    }
    try {
        return from_parts(dim, p, seed, std::move(weights), std::move(hab), edge_list, epochs_trained);
    } catch (const InvalidArgument& e) {
        throw FormatError(std::string("invalid network file: ") + e.what());
    }
}

void GwrNetwork::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    save(out);
}

GwrNetwork GwrNetwork::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    return load(in);
}

} // namespace reach
