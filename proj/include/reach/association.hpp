#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reach/gwr.hpp"

namespace reach {

/// Which side of a table a recall starts from.
enum class Direction { AtoB, BtoA };

inline constexpr double kDefaultHebbianRate = 0.5;

/**
 * Sparse Hebbian weights between the neurons of two networks.
 *
 * The table is undirected: a weight links neuron i of side A with neuron j
 * of side B and can be read from either side. Absent pairs have weight zero
 * and every stored weight is strictly positive.
 */
class AssociationTable {
public:
    AssociationTable(std::string id_a, int count_a, std::string id_b, int count_b,
                     double alpha = kDefaultHebbianRate);

    const std::string& id_a() const { return id_a_; }
    const std::string& id_b() const { return id_b_; }
    int count_a() const { return static_cast<int>(rows_.size()); }
    int count_b() const { return static_cast<int>(cols_.size()); }
    double alpha() const { return alpha_; }

    /// w_ab += alpha * activity_a * activity_b
    void strengthen(int a, int b, double activity_a, double activity_b);

    double weight(int a, int b) const;
    const std::map<int, double>& row(int a) const;     ///< B-neighbours of A-neuron a
    const std::map<int, double>& column(int b) const;  ///< A-neighbours of B-neuron b

    std::size_t entry_count() const;
    int connected_a() const;
    int connected_b() const;

    /// Most strongly associated partner on the other side; lowest index on ties.
    std::optional<int> strongest(int neuron, Direction dir) const;

    void save(std::ostream& out) const;
    static AssociationTable load(std::istream& in);
    void save(const std::string& path) const;
    static AssociationTable load(const std::string& path);

    bool operator==(const AssociationTable&) const = default;

private:
    std::string id_a_;
    std::string id_b_;
    double alpha_;
    std::vector<std::map<int, double>> rows_;
    std::vector<std::map<int, double>> cols_;
};

/// One pass over paired samples; BMUs and activities come from each network.
/// Neither network is modified.
void accumulate_associations(AssociationTable& table, const GwrNetwork& net_a, const GwrNetwork& net_b,
                             const VectorSet& inputs_a, const VectorSet& inputs_b);

AssociationTable build_associations(const GwrNetwork& net_a, const GwrNetwork& net_b, const VectorSet& inputs_a,
                                    const VectorSet& inputs_b, double alpha = kDefaultHebbianRate,
                                    std::string id_a = "a", std::string id_b = "b");

/**
 * Weight vector of the partner neuron most strongly co-activated with the
 * BMU of `input` in `from`. With Direction::AtoB, `from` must be the table's
 * side-A network; with BtoA, its side-B network.
 *
 * Throws NoAssociationError when the BMU has no stored association.
 */
std::span<const double> recall(const AssociationTable& table, const GwrNetwork& from, const GwrNetwork& to,
                               std::span<const double> input, Direction dir = Direction::AtoB);

} // namespace reach
