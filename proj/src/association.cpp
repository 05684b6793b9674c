#include "reach/association.hpp"

#include <fstream>

#include "reach/binary_io.hpp"
#include "reach/error.hpp"

namespace reach {

namespace {
constexpr char kTableMagic[8] = {'H', 'E', 'B', 'B', 'T', 'B', '1', '\0'};
constexpr std::uint32_t kTableVersion = 1;
} // namespace

AssociationTable::AssociationTable(std::string id_a, int count_a, std::string id_b, int count_b, double alpha)
    : id_a_(std::move(id_a)), id_b_(std::move(id_b)), alpha_(alpha) {
    if (count_a < 0 || count_b < 0) throw InvalidArgument("negative neuron count");
    if (!(alpha > 0.0)) throw InvalidArgument("Hebbian rate must be positive");
    rows_.resize(static_cast<std::size_t>(count_a));
    cols_.resize(static_cast<std::size_t>(count_b));
}

void AssociationTable::strengthen(int a, int b, double activity_a, double activity_b) {
    if (a < 0 || a >= count_a() || b < 0 || b >= count_b())
        throw InvalidArgument("association index out of range");
    if (!(activity_a > 0.0 && activity_a <= 1.0) || !(activity_b > 0.0 && activity_b <= 1.0))
        throw InvalidArgument("activities must lie in (0, 1]");
    const double delta = alpha_ * activity_a * activity_b;
    const double w = (rows_[static_cast<std::size_t>(a)][b] += delta);
    cols_[static_cast<std::size_t>(b)][a] = w;
}

double AssociationTable::weight(int a, int b) const {
    const auto& r = row(a);
    const auto it = r.find(b);
    return it == r.end() ? 0.0 : it->second;
}

const std::map<int, double>& AssociationTable::row(int a) const {
    if (a < 0 || a >= count_a()) throw InvalidArgument("association index out of range");
    return rows_[static_cast<std::size_t>(a)];
}

const std::map<int, double>& AssociationTable::column(int b) const {
    if (b < 0 || b >= count_b()) throw InvalidArgument("association index out of range");
    return cols_[static_cast<std::size_t>(b)];
}

std::size_t AssociationTable::entry_count() const {
    std::size_t n = 0;
    for (const auto& r : rows_) n += r.size();
    return n;
}

int AssociationTable::connected_a() const {
    int n = 0;
    for (const auto& r : rows_) n += r.empty() ? 0 : 1;
    return n;
}

int AssociationTable::connected_b() const {
    int n = 0;
    for (const auto& c : cols_) n += c.empty() ? 0 : 1;
    return n;
}

std::optional<int> AssociationTable::strongest(int neuron, Direction dir) const {
    const auto& entries = dir == Direction::AtoB ? row(neuron) : column(neuron);
    std::optional<int> best;
    double best_w = 0.0;
    // std::map iterates in index order, so strict > keeps the lowest index on ties.
    for (const auto& [index, w] : entries) {
        if (!best || w > best_w) {
            best = index;
            best_w = w;
        }
    }
    return best;
}

void AssociationTable::save(std::ostream& out) const {
    out.write(kTableMagic, 8);
    io::write<std::uint32_t>(out, kTableVersion);
    io::write_string(out, id_a_);
    io::write<std::int32_t>(out, count_a());
    io::write_string(out, id_b_);
    io::write<std::int32_t>(out, count_b());
    io::write(out, alpha_);
    io::write<std::uint64_t>(out, entry_count());
    for (int a = 0; a < count_a(); ++a)
        for (const auto& [b, w] : rows_[static_cast<std::size_t>(a)]) {
            io::write<std::int32_t>(out, a);
            io::write<std::int32_t>(out, b);
            io::write(out, w);
        }
    if (!out) throw FormatError("failed to write association table");
}

AssociationTable AssociationTable::load(std::istream& in) {
    io::expect_magic(in, kTableMagic);
    if (io::read<std::uint32_t>(in) != kTableVersion) throw FormatError("unsupported association version");
    auto id_a = io::read_string(in);
    const auto count_a = io::read<std::int32_t>(in);
    auto id_b = io::read_string(in);
    const auto count_b = io::read<std::int32_t>(in);
    const auto alpha = io::read<double>(in);
    const auto entries = io::read<std::uint64_t>(in);
    try {
        AssociationTable table(std::move(id_a), count_a, std::move(id_b), count_b, alpha);
        for (std::uint64_t i = 0; i < entries; ++i) {
            const auto a = io::read<std::int32_t>(in);
            const auto b = io::read<std::int32_t>(in);
            const auto w = io::read<double>(in);
            if (a < 0 || a >= count_a || b < 0 || b >= count_b || !(w > 0.0))
                throw FormatError("invalid association record");
            table.rows_[static_cast<std::size_t>(a)][b] = w;
            table.cols_[static_cast<std::size_t>(b)][a] = w;
        }
        return table;
    } catch (const InvalidArgument& e) {
        throw FormatError(std::string("invalid association file: ") + e.what());
    }
}

void AssociationTable::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    save(out);
}

AssociationTable AssociationTable::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    return load(in);
}

void accumulate_associations(AssociationTable& table, const GwrNetwork& net_a, const GwrNetwork& net_b,
                             const VectorSet& inputs_a, const VectorSet& inputs_b) {
    if (inputs_a.size() != inputs_b.size()) throw InvalidArgument("paired inputs differ in length");
    if (inputs_a.empty()) throw InvalidArgument("no sample pairs");
    if (inputs_a.dim() != net_a.dim() || inputs_b.dim() != net_b.dim())
        throw DimensionError("sample dimension does not match network");
    if (table.count_a() != net_a.size() || table.count_b() != net_b.size())
        throw InvalidArgument("table was built for networks of a different size");
    for (std::size_t i = 0; i < inputs_a.size(); ++i) {
        const auto [a, act_a] = net_a.query_nearest(inputs_a[i]);
        const auto [b, act_b] = net_b.query_nearest(inputs_b[i]);
        table.strengthen(a, b, act_a, act_b);
    }
}

AssociationTable build_associations(const GwrNetwork& net_a, const GwrNetwork& net_b, const VectorSet& inputs_a,
                                    const VectorSet& inputs_b, double alpha, std::string id_a, std::string id_b) {
    AssociationTable table(std::move(id_a), net_a.size(), std::move(id_b), net_b.size(), alpha);
    accumulate_associations(table, net_a, net_b, inputs_a, inputs_b);
    return table;
}

std::span<const double> recall(const AssociationTable& table, const GwrNetwork& from, const GwrNetwork& to,
                               std::span<const double> input, Direction dir) {
    const int from_count = dir == Direction::AtoB ? table.count_a() : table.count_b();
    const int to_count = dir == Direction::AtoB ? table.count_b() : table.count_a();
    if (from.size() != from_count || to.size() != to_count)
        throw InvalidArgument("networks do not match the association table");
    const int bmu = from.nearest(input).first;
    const auto partner = table.strongest(bmu, dir);
    if (!partner) throw NoAssociationError(bmu);
    return to.weight(*partner);
}

} // namespace reach
