#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "spikeforge/bits.hpp"
#include "spikeforge/errors.hpp"

namespace spikeforge {

/// Core geometry plus the storage width of one synaptic weight.
struct TableDims {
    uint32_t inputs = 0;       // axon lines entering the core (rows)
    uint32_t neurons = 0;      // post-synaptic targets (columns)
    uint32_t weight_bits = 0;  // stored bits per weight

    uint64_t cells() const { return uint64_t(inputs) * neurons; }
    void validate() const;  // throws std::invalid_argument
    bool operator==(const TableDims&) const = default;
};

/// Width of a run-count field: ceil(log2(neurons)). With trailing runs
/// omitted no run inside a row can exceed neurons - 1, so this always fits.
uint32_t run_field_bits(const TableDims& dims);

/// Width of one pointer-table entry: ceil(log2(inputs*neurons*(1+weight_bits)+1)),
/// i.e. enough to bit-address one past the end of a fully connected stream.
uint32_t pointer_field_bits(const TableDims& dims);

/// Round half away from zero and clamp into the signed `bits`-wide range
/// [-2^(bits-1), 2^(bits-1)-1]. `clamped`, when given, is set if the value
/// had to be clamped.
int64_t quantize_weight(double w, uint32_t bits, bool* clamped = nullptr);

/// Connection pattern plus simulation weights. Presence is structural:
/// an absent pair is distinct from a present pair of weight zero, and the
/// pattern never changes after construction of a table from it.
class ConnectivityMatrix {
public:
    explicit ConnectivityMatrix(TableDims dims);

    const TableDims& dims() const { return dims_; }
    bool present(uint32_t input, uint32_t neuron) const;
    double weight(uint32_t input, uint32_t neuron) const;  // 0.0 when absent

    /// Add or replace a connection (construction phase).
    void connect(uint32_t input, uint32_t neuron, double weight);
    /// Update the weight of an existing connection.
    void set_weight(uint32_t input, uint32_t neuron, double weight);

    uint64_t connection_count() const { return count_; }
    double density() const;

    /// Visit the present connections of one row in ascending neuron order.
    void for_each_in_row(uint32_t input,
                         const std::function<void(uint32_t, double)>& visit) const;

    bool operator==(const ConnectivityMatrix&) const = default;

private:
    size_t cell(uint32_t input, uint32_t neuron) const {
        return size_t(input) * dims_.neurons + neuron;
    }
    void check_bounds(uint32_t input, uint32_t neuron) const;

    TableDims dims_;
    std::vector<uint8_t> present_;
    std::vector<double> weight_;
    uint64_t count_ = 0;
};

struct RowEntry {
    uint32_t neuron = 0;
    double weight = 0.0;
    bool operator==(const RowEntry&) const = default;
};

enum class TableKind { crossbar, indexed };

/// Counters reported by table construction.
struct EncodeStats {
    uint64_t clamped = 0;  // weights outside the storable range
};

/// Storage-layout view of a connection table. Both layouts hold weights
/// quantized to `weight_bits` and expose forward row lookup only; the
/// structure (which pairs exist) is immutable after construction.
class WeightTable {
public:
    virtual ~WeightTable() = default;

    virtual TableKind kind() const = 0;
    virtual const TableDims& dims() const = 0;
    virtual uint64_t memory_bits() const = 0;

    /// Present connections of one row, ascending neuron index. Weights are
    /// the stored (quantized) values.
    virtual void for_each_in_row(
        uint32_t input, const std::function<void(uint32_t, double)>& visit) const = 0;

    /// Overwrite the stored weight of an existing connection; quantizes to
    /// the table width. Throws NoSuchConnectionError for absent pairs.
    virtual void set_weight(uint32_t input, uint32_t neuron, double weight) = 0;

    std::vector<RowEntry> row(uint32_t input) const;
};

/// Dense layout: a reserved weight slot for every (input, neuron) pair,
/// so memory is exactly inputs * neurons * weight_bits.
class CrossbarTable final : public WeightTable {
public:
    CrossbarTable(const ConnectivityMatrix& m, EncodeStats* stats = nullptr);

    TableKind kind() const override { return TableKind::crossbar; }
    const TableDims& dims() const override { return dims_; }
    uint64_t memory_bits() const override { return dims_.cells() * dims_.weight_bits; }
    void for_each_in_row(uint32_t input,
                         const std::function<void(uint32_t, double)>& visit) const override;
    void set_weight(uint32_t input, uint32_t neuron, double weight) override;

private:
    TableDims dims_;
    std::vector<uint8_t> present_;
    std::vector<int64_t> value_;
};

/// Compressed layout: a pointer table with one bit offset per input (plus an
/// end sentinel) into a run-length-encoded weight stream.
///
/// Stream grammar per row, most significant bit first:
///   entry := '1'  weight[weight_bits]     -- connection at the next position
///          | '0'  run[run_field_bits]     -- skip run >= 1 absent positions
/// Trailing absent positions of a row are omitted entirely; an empty row
/// occupies zero bits. Weights are signed two's complement.
class IndexedTable final : public WeightTable {
public:
    TableKind kind() const override { return TableKind::indexed; }
    const TableDims& dims() const override { return dims_; }
    uint32_t run_bits() const { return run_bits_; }
    uint32_t pointer_bits() const { return ptr_bits_; }
    const std::vector<uint64_t>& pointers() const { return pointers_; }
    const BitBuffer& stream() const { return stream_; }

    /// Pointer table plus stream: (inputs + 1) * pointer_bits + stream bits.
    uint64_t memory_bits() const override {
        return uint64_t(dims_.inputs + 1) * ptr_bits_ + stream_.size_bits();
    }

    void for_each_in_row(uint32_t input,
                         const std::function<void(uint32_t, double)>& visit) const override;
    void set_weight(uint32_t input, uint32_t neuron, double weight) override;

    bool operator==(const IndexedTable& o) const {
        return dims_ == o.dims_ && pointers_ == o.pointers_ && stream_ == o.stream_;
    }

    /// Construct from raw parts, validating every row. Throws
    /// CorruptTableError when the stream is malformed.
    static IndexedTable from_parts(TableDims dims, std::vector<uint64_t> pointers,
                                   BitBuffer stream);

private:
    friend IndexedTable encode_indexed(const ConnectivityMatrix&, EncodeStats*);

    IndexedTable(TableDims dims, std::vector<uint64_t> pointers, BitBuffer stream);
    void validate_rows() const;

    /// Walk row entries; visit(neuron, weight_bit_pos, qweight) -> keep going?
    template <typename F>
    void walk_row(uint32_t input, F&& visit) const;

    TableDims dims_;
    uint32_t run_bits_ = 0;
    uint32_t ptr_bits_ = 0;
    std::vector<uint64_t> pointers_;
    BitBuffer stream_;
};

IndexedTable encode_indexed(const ConnectivityMatrix& m, EncodeStats* stats = nullptr);
ConnectivityMatrix decode_indexed(const IndexedTable& table);

std::unique_ptr<WeightTable> build_table(TableKind kind, const ConnectivityMatrix& m,
                                         EncodeStats* stats = nullptr);

struct MemoryReport {
    uint64_t crossbar_bits = 0;
    uint64_t indexed_bits = 0;
    double density = 0.0;
};

MemoryReport memory_report(const ConnectivityMatrix& m);

// -- file formats ------------------------------------------------------

/// Text edge list: header "pre,post,weight", then one "i,j,w" line per
/// connection. When `dims` is empty the geometry is inferred from the
/// largest indices and `default_weight_bits`.
ConnectivityMatrix load_edge_list(std::istream& in, std::optional<TableDims> dims = {},
                                  uint32_t default_weight_bits = 9);
void save_edge_list(std::ostream& out, const ConnectivityMatrix& m);

/// Binary dump: magic "IDXWT1"; inputs, neurons, weight_bits, run_bits,
/// pointer_bits as little-endian u32; then the pointer table and the weight
/// stream bit-packed back to back, padded to a byte boundary only at the end.
void save_indexed(std::ostream& out, const IndexedTable& table);
IndexedTable load_indexed(std::istream& in);

}  // namespace spikeforge
