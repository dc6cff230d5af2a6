#include "spikeforge/connectivity.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace spikeforge {

void TableDims::validate() const {
    if (inputs < 1) throw std::invalid_argument("TableDims: inputs must be >= 1");
    if (neurons < 1) throw std::invalid_argument("TableDims: neurons must be >= 1");
    if (weight_bits < 1 || weight_bits > 64)
        throw std::invalid_argument("TableDims: weight_bits must be in [1, 64]");
}

uint32_t run_field_bits(const TableDims& dims) {
    return uint32_t(std::bit_width(uint64_t(dims.neurons) - 1));
}

uint32_t pointer_field_bits(const TableDims& dims) {
    const uint64_t max_stream = dims.cells() * (1 + uint64_t(dims.weight_bits));
    return uint32_t(std::bit_width(max_stream));
}

int64_t quantize_weight(double w, uint32_t bits, bool* clamped) {
    if (std::isnan(w)) throw std::invalid_argument("quantize_weight: NaN weight");
    const int64_t lo = bits >= 64 ? std::numeric_limits<int64_t>::min()
                                  : -(int64_t(1) << (bits - 1));
    const int64_t hi = bits >= 64 ? std::numeric_limits<int64_t>::max()
                                  : (int64_t(1) << (bits - 1)) - 1;
    bool clip = false;
    int64_t q;
    // stay clear of llround overflow near the int64 limits; doubles out here
    // are >= 1024 apart anyway
    if (w >= 9.2e18) {
        q = hi;
        clip = true;
    } else if (w <= -9.2e18) {
        q = lo;
        clip = true;
    } else {
        q = std::llround(w);  // ties away from zero
        if (q < lo) {
            q = lo;
            clip = true;
        } else if (q > hi) {
            q = hi;
            clip = true;
        }
    }
    if (clamped) *clamped = clip;
    return q;
}

namespace {

uint64_t weight_field(int64_t q, uint32_t bits) {
    if (bits >= 64) return uint64_t(q);
    return uint64_t(q) & ((uint64_t(1) << bits) - 1);
}

int64_t sign_extend(uint64_t raw, uint32_t bits) {
    if (bits >= 64) return int64_t(raw);
    const uint64_t sign = uint64_t(1) << (bits - 1);
    if (raw & sign) raw |= ~((uint64_t(1) << bits) - 1);
    return int64_t(raw);
}

}  // namespace

// -- ConnectivityMatrix ------------------------------------------------

ConnectivityMatrix::ConnectivityMatrix(TableDims dims) : dims_(dims) {
    dims_.validate();
    present_.assign(size_t(dims_.cells()), 0);
    weight_.assign(size_t(dims_.cells()), 0.0);
}

void ConnectivityMatrix::check_bounds(uint32_t input, uint32_t neuron) const {
    if (input >= dims_.inputs || neuron >= dims_.neurons)
        throw std::out_of_range("connection index out of range");
}

bool ConnectivityMatrix::present(uint32_t input, uint32_t neuron) const {
    check_bounds(input, neuron);
    return present_[cell(input, neuron)] != 0;
}

double ConnectivityMatrix::weight(uint32_t input, uint32_t neuron) const {
    check_bounds(input, neuron);
    return weight_[cell(input, neuron)];
}

void ConnectivityMatrix::connect(uint32_t input, uint32_t neuron, double weight) {
    check_bounds(input, neuron);
    const size_t c = cell(input, neuron);
    if (!present_[c]) {
        present_[c] = 1;
        ++count_;
    }
    weight_[c] = weight;
}

void ConnectivityMatrix::set_weight(uint32_t input, uint32_t neuron, double weight) {
    check_bounds(input, neuron);
    const size_t c = cell(input, neuron);
    if (!present_[c])
        throw NoSuchConnectionError("set_weight: no connection at (" +
                                    std::to_string(input) + ", " + std::to_string(neuron) + ")");
    weight_[c] = weight;
}

double ConnectivityMatrix::density() const {
    return double(count_) / double(dims_.cells());
}

void ConnectivityMatrix::for_each_in_row(
    uint32_t input, const std::function<void(uint32_t, double)>& visit) const {
    if (input >= dims_.inputs) throw std::out_of_range("row index out of range");
    const size_t base = size_t(input) * dims_.neurons;
    for (uint32_t j = 0; j < dims_.neurons; ++j) {
        if (present_[base + j]) visit(j, weight_[base + j]);
    }
}

std::vector<RowEntry> WeightTable::row(uint32_t input) const {
    std::vector<RowEntry> out;
    for_each_in_row(input, [&](uint32_t j, double w) { out.push_back({j, w}); });
    return out;
}

// -- CrossbarTable -----------------------------------------------------

CrossbarTable::CrossbarTable(const ConnectivityMatrix& m, EncodeStats* stats)
    : dims_(m.dims()) {
    present_.assign(size_t(dims_.cells()), 0);
    value_.assign(size_t(dims_.cells()), 0);
    for (uint32_t i = 0; i < dims_.inputs; ++i) {
        m.for_each_in_row(i, [&](uint32_t j, double w) {
            bool clip = false;
            const size_t c = size_t(i) * dims_.neurons + j;
            present_[c] = 1;
            value_[c] = quantize_weight(w, dims_.weight_bits, &clip);
            if (clip && stats) ++stats->clamped;
        });
    }
}

void CrossbarTable::for_each_in_row(
    uint32_t input, const std::function<void(uint32_t, double)>& visit) const {
    if (input >= dims_.inputs) throw std::out_of_range("row index out of range");
    const size_t base = size_t(input) * dims_.neurons;
    for (uint32_t j = 0; j < dims_.neurons; ++j) {
        if (present_[base + j]) visit(j, double(value_[base + j]));
    }
}

void CrossbarTable::set_weight(uint32_t input, uint32_t neuron, double weight) {
    if (input >= dims_.inputs || neuron >= dims_.neurons)
        throw std::out_of_range("connection index out of range");
    const size_t c = size_t(input) * dims_.neurons + neuron;
    if (!present_[c])
        throw NoSuchConnectionError("set_weight: no connection at (" +
                                    std::to_string(input) + ", " + std::to_string(neuron) + ")");
    value_[c] = quantize_weight(weight, dims_.weight_bits);
}

// -- IndexedTable ------------------------------------------------------

IndexedTable::IndexedTable(TableDims dims, std::vector<uint64_t> pointers, BitBuffer stream)
    : dims_(dims),
      run_bits_(run_field_bits(dims)),
      ptr_bits_(pointer_field_bits(dims)),
      pointers_(std::move(pointers)),
      stream_(std::move(stream)) {}

IndexedTable IndexedTable::from_parts(TableDims dims, std::vector<uint64_t> pointers,
                                      BitBuffer stream) {
    dims.validate();
    if (pointers.size() != size_t(dims.inputs) + 1)
        throw CorruptTableError("pointer table must have inputs + 1 entries");
    if (pointers.front() != 0) throw CorruptTableError("first pointer must be 0");
    for (size_t i = 0; i + 1 < pointers.size(); ++i) {
        if (pointers[i] > pointers[i + 1])
            throw CorruptTableError("pointer table must be non-decreasing");
    }
    if (pointers.back() != stream.size_bits())
        throw CorruptTableError("end sentinel must equal the stream length");
    IndexedTable t(dims, std::move(pointers), std::move(stream));
    t.validate_rows();
    return t;
}

template <typename F>
void IndexedTable::walk_row(uint32_t input, F&& visit) const {
    if (input >= dims_.inputs) throw std::out_of_range("row index out of range");
    uint64_t pos = pointers_[input];
    const uint64_t end = pointers_[input + 1];
    uint64_t covered = 0;
    bool last_was_run = false;
    while (pos < end) {
        const uint64_t flag = stream_.read(pos, 1);
        pos += 1;
        if (flag) {
            if (end - pos < dims_.weight_bits)
                throw CorruptTableError("weight field crosses a row boundary");
            const uint64_t raw = stream_.read(pos, dims_.weight_bits);
            if (covered >= dims_.neurons)
                throw CorruptTableError("row describes more positions than neurons");
            if (!visit(uint32_t(covered), pos, sign_extend(raw, dims_.weight_bits)))
                return;
            pos += dims_.weight_bits;
            ++covered;
            last_was_run = false;
        } else {
            if (run_bits_ == 0 || end - pos < run_bits_)
                throw CorruptTableError("run field crosses a row boundary");
            const uint64_t run = stream_.read(pos, run_bits_);
            pos += run_bits_;
            if (run == 0) throw CorruptTableError("run count of zero");
            covered += run;
            if (covered > dims_.neurons)
                throw CorruptTableError("row describes more positions than neurons");
            last_was_run = true;
        }
    }
    if (last_was_run) throw CorruptTableError("trailing run in a row");
}

void IndexedTable::validate_rows() const {
    for (uint32_t i = 0; i < dims_.inputs; ++i) {
        walk_row(i, [](uint32_t, uint64_t, int64_t) { return true; });
    }
}

void IndexedTable::for_each_in_row(
    uint32_t input, const std::function<void(uint32_t, double)>& visit) const {
    walk_row(input, [&](uint32_t j, uint64_t, int64_t q) {
        visit(j, double(q));
        return true;
    });
}

void IndexedTable::set_weight(uint32_t input, uint32_t neuron, double weight) {
    if (neuron >= dims_.neurons) throw std::out_of_range("connection index out of range");
    bool found = false;
    uint64_t at = 0;
    walk_row(input, [&](uint32_t j, uint64_t pos, int64_t) {
        if (j < neuron) return true;
        if (j == neuron) {
            found = true;
            at = pos;
        }
        return false;  // j >= neuron: either found or absent
    });
    if (!found)
        throw NoSuchConnectionError("set_weight: no connection at (" +
                                    std::to_string(input) + ", " + std::to_string(neuron) + ")");
    const int64_t q = quantize_weight(weight, dims_.weight_bits);
    stream_.overwrite(at, weight_field(q, dims_.weight_bits), dims_.weight_bits);
}

IndexedTable encode_indexed(const ConnectivityMatrix& m, EncodeStats* stats) {
    const TableDims& dims = m.dims();
    const uint32_t rbits = run_field_bits(dims);
    const uint32_t wbits = dims.weight_bits;

    BitBuffer stream;
    std::vector<uint64_t> pointers(size_t(dims.inputs) + 1, 0);
    for (uint32_t i = 0; i < dims.inputs; ++i) {
        uint32_t next = 0;
        m.for_each_in_row(i, [&](uint32_t j, double w) {
            if (j > next) {
                stream.append(0, 1);
                stream.append(j - next, rbits);
            }
            bool clip = false;
            const int64_t q = quantize_weight(w, wbits, &clip);
            if (clip && stats) ++stats->clamped;
            stream.append(1, 1);
            stream.append(weight_field(q, wbits), wbits);
            next = j + 1;
        });
        pointers[i + 1] = stream.size_bits();
    }
    return IndexedTable(dims, std::move(pointers), std::move(stream));
}

ConnectivityMatrix decode_indexed(const IndexedTable& table) {
    ConnectivityMatrix m(table.dims());
    for (uint32_t i = 0; i < table.dims().inputs; ++i) {
        table.for_each_in_row(i, [&](uint32_t j, double w) { m.connect(i, j, w); });
    }
    return m;
}

std::unique_ptr<WeightTable> build_table(TableKind kind, const ConnectivityMatrix& m,
                                         EncodeStats* stats) {
    if (kind == TableKind::crossbar)
        return std::make_unique<CrossbarTable>(m, stats);
    return std::make_unique<IndexedTable>(encode_indexed(m, stats));
}

MemoryReport memory_report(const ConnectivityMatrix& m) {
    MemoryReport r;
    r.crossbar_bits = m.dims().cells() * m.dims().weight_bits;
    r.indexed_bits = encode_indexed(m).memory_bits();
    r.density = m.density();
    return r;
}

// -- edge-list text format ---------------------------------------------

namespace {

std::string trim(std::string s) {
    const auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && issp(s.back())) s.pop_back();
    size_t b = 0;
    while (b < s.size() && issp(s[b])) ++b;
    return s.substr(b);
}

std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

ConnectivityMatrix load_edge_list(std::istream& in, std::optional<TableDims> dims,
                                  uint32_t default_weight_bits) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != "pre,post,weight")
        throw IoError("edge list: missing 'pre,post,weight' header");

    struct Edge {
        uint32_t pre, post;
        double weight;
    };
    std::vector<Edge> edges;
    uint32_t max_pre = 0, max_post = 0;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        Edge e{};
        char comma1 = 0, comma2 = 0;
        std::istringstream ls(t);
        if (!(ls >> e.pre >> comma1 >> e.post >> comma2 >> e.weight) || comma1 != ',' ||
            comma2 != ',' || !(ls >> std::ws).eof())
            throw IoError("edge list line " + std::to_string(lineno) + ": expected 'pre,post,weight'");
        max_pre = std::max(max_pre, e.pre);
        max_post = std::max(max_post, e.post);
        edges.push_back(e);
    }

    TableDims d;
    if (dims) {
        d = *dims;
    } else {
        if (edges.empty())
            throw IoError("edge list: cannot infer dimensions from an empty list");
        d = TableDims{max_pre + 1, max_post + 1, default_weight_bits};
    }
    d.validate();

    ConnectivityMatrix m(d);
    for (const Edge& e : edges) {
        if (e.pre >= d.inputs || e.post >= d.neurons)
            throw IoError("edge list: index (" + std::to_string(e.pre) + ", " +
                          std::to_string(e.post) + ") outside " + std::to_string(d.inputs) +
                          "x" + std::to_string(d.neurons));
        if (m.present(e.pre, e.post))
            throw IoError("edge list: duplicate connection (" + std::to_string(e.pre) + ", " +
                          std::to_string(e.post) + ")");
        m.connect(e.pre, e.post, e.weight);
    }
    return m;
}

void save_edge_list(std::ostream& out, const ConnectivityMatrix& m) {
    out << "pre,post,weight\n";
    for (uint32_t i = 0; i < m.dims().inputs; ++i) {
        m.for_each_in_row(i, [&](uint32_t j, double w) {
            out << i << ',' << j << ',' << fmt_double(w) << '\n';
        });
    }
}

// -- binary dump --------------------------------------------------------

namespace {

constexpr char kMagic[6] = {'I', 'D', 'X', 'W', 'T', '1'};

void put_u32(std::ostream& out, uint32_t v) {
    const uint8_t b[4] = {uint8_t(v), uint8_t(v >> 8), uint8_t(v >> 16), uint8_t(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::istream& in) {
    uint8_t b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw IoError("table dump: truncated header");
    return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 | uint32_t(b[3]) << 24;
}

}  // namespace

void save_indexed(std::ostream& out, const IndexedTable& t) {
    out.write(kMagic, sizeof kMagic);
    put_u32(out, t.dims().inputs);
    put_u32(out, t.dims().neurons);
    put_u32(out, t.dims().weight_bits);
    put_u32(out, t.run_bits());
    put_u32(out, t.pointer_bits());

    BitBuffer packed;
    for (uint64_t p : t.pointers()) packed.append(p, t.pointer_bits());
    const BitBuffer& s = t.stream();
    for (uint64_t k = 0; k < s.size_bits(); ++k) packed.append(s.read(k, 1), 1);
    out.write(reinterpret_cast<const char*>(packed.bytes().data()),
              std::streamsize(packed.bytes().size()));
    if (!out) throw IoError("table dump: write failed");
}

IndexedTable load_indexed(std::istream& in) {
    char magic[6];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw IoError("table dump: bad magic");
    TableDims dims;
    dims.inputs = get_u32(in);
    dims.neurons = get_u32(in);
    dims.weight_bits = get_u32(in);
    const uint32_t rbits = get_u32(in);
    const uint32_t pbits = get_u32(in);
    dims.validate();
    if (rbits != run_field_bits(dims) || pbits != pointer_field_bits(dims))
        throw CorruptTableError("table dump: field widths disagree with the dimensions");

    std::vector<uint8_t> body(std::istreambuf_iterator<char>(in), {});
    const uint64_t body_bits = uint64_t(body.size()) * 8;
    const uint64_t ptr_bits_total = uint64_t(dims.inputs + 1) * pbits;
    if (body_bits < ptr_bits_total)
        throw CorruptTableError("table dump: truncated pointer table");

    const BitBuffer all = BitBuffer::from_bytes(std::move(body), body_bits);
    std::vector<uint64_t> pointers(size_t(dims.inputs) + 1);
    for (size_t i = 0; i < pointers.size(); ++i)
        pointers[i] = all.read(uint64_t(i) * pbits, pbits);

    const uint64_t stream_bits = pointers.back();
    const uint64_t total_bits = ptr_bits_total + stream_bits;
    if ((total_bits + 7) / 8 != all.size_bits() / 8)
        throw CorruptTableError("table dump: size disagrees with the end sentinel");

    BitBuffer stream;
    for (uint64_t k = 0; k < stream_bits; ++k)
        stream.append(all.read(ptr_bits_total + k, 1), 1);
    return IndexedTable::from_parts(dims, std::move(pointers), std::move(stream));
}

}  // namespace spikeforge
