// VMAT1 snapshot: little-endian, varint-heavy.
//
//   "VMAT1"
//   config   threshold u64, M u32, ef_construction u32, level_norm f64,
//            seed u64, index_reuse u8, metric u8
//   store    dim u32, count u32, count*dim f32
//   esam     state count, per state (max_len, link+1, transitions, ids),
//            sequence count, total length
//   indexes  per state: kind u8, inherited+1, base ids, graph if kind == 1
//   tombstones as a sorted id list
//
// The worker count is a build-time setting and is not stored, so serial and
// parallel builds produce identical files.

#include <fstream>
#include <iterator>
#include <string>

#include "vectormaton/index.hpp"
#include "vectormaton/serialize.hpp"

namespace vectormaton {

namespace {

constexpr std::string_view kMagic = "VMAT1";

}  // namespace

std::vector<std::uint8_t> VectorMatonIndex::serialize() const {
  io::ByteWriter out;
  out.put_bytes(kMagic);

  out.put_u64(config_.threshold);
  out.put_u32(config_.hnsw.M);
  out.put_u32(config_.hnsw.ef_construction);
  out.put_f64(config_.hnsw.level_norm);
  out.put_u64(config_.hnsw.seed);
  out.put_u8(config_.index_reuse ? 1 : 0);
  out.put_u8(static_cast<std::uint8_t>(store_.metric()));

  out.put_u32(static_cast<std::uint32_t>(store_.dim()));
  out.put_u32(static_cast<std::uint32_t>(store_.size()));
  for (float f : store_.raw()) out.put_f32(f);

  esam_.serialize(out);

  for (const StateIndex& idx : indexes_) {
    out.put_u8(static_cast<std::uint8_t>(idx.kind));
    out.put_varint(idx.inherited ? std::uint64_t{*idx.inherited} + 1 : 0);
    out.put_sorted_ids(idx.base);
    if (idx.graph) idx.graph->serialize(out);
  }

  out.put_sorted_ids(tombstones_.ids());
  return out.take();
}

VectorMatonIndex VectorMatonIndex::deserialize(std::span<const std::uint8_t> bytes) {
  io::ByteReader in(bytes);
  if (in.get_bytes(kMagic.size()) != kMagic) throw FormatError("snapshot: bad magic");

  VectorMatonIndex index;
  BuildConfig& cfg = index.config_;
  cfg.threshold = in.get_u64();
  cfg.hnsw.M = in.get_u32();
  cfg.hnsw.ef_construction = in.get_u32();
  cfg.hnsw.level_norm = in.get_f64();
  cfg.hnsw.seed = in.get_u64();
  const std::uint8_t reuse = in.get_u8();
  const std::uint8_t metric = in.get_u8();
  if (reuse > 1 || metric > 1) throw FormatError("snapshot: bad config flags");
  cfg.index_reuse = reuse == 1;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("snapshot: bad config: ") + e.what());
  }

  const std::uint32_t dim = in.get_u32();
  const std::uint32_t count = in.get_u32();
  if (dim == 0) throw FormatError("snapshot: zero dimension");
  index.store_ = VectorStore(dim, static_cast<Metric>(metric));
  std::vector<float> row(dim);
  for (std::uint32_t i = 0; i < count; ++i) {
    for (auto& f : row) f = in.get_f32();
    index.store_.push_back(row);
  }

  index.esam_ = Esam::deserialize(in);
  const std::size_t states = index.esam_.state_count();
  for (const auto& st : index.esam_.states()) {
    if (!st.ids.empty() && !index.store_.contains(st.ids.back())) {
      throw FormatError("snapshot: state references unknown vector id");
    }
  }
  index.indexes_.resize(states);
  for (std::size_t u = 0; u < states; ++u) {
    StateIndex& idx = index.indexes_[u];
    const std::uint8_t kind = in.get_u8();
    if (kind > 1) throw FormatError("snapshot: bad state index kind at state " + std::to_string(u));
    idx.kind = static_cast<StateIndex::Kind>(kind);
    const auto inherited = in.get_varint();
    if (inherited > states) throw FormatError("snapshot: inherited state out of range");
    if (inherited != 0) idx.inherited = static_cast<StateId>(inherited - 1);
    idx.base = in.get_sorted_ids();
    if (idx.kind == StateIndex::Kind::kGraph) idx.graph = HnswGraph::deserialize(in);
  }
  for (VectorId id : in.get_sorted_ids()) {
    if (!index.store_.contains(id)) throw FormatError("snapshot: tombstone for unknown id");
    index.tombstones_.insert(id);
  }
  if (!in.at_end()) throw FormatError("snapshot: trailing bytes at " + std::to_string(in.offset()));
  if (const std::string err = index.check_exact_cover(); !err.empty()) {
    throw FormatError("snapshot: inconsistent index: " + err);
  }
  return index;
}

void VectorMatonIndex::save(const std::string& path) const {
  const auto bytes = serialize();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

VectorMatonIndex VectorMatonIndex::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open snapshot " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace vectormaton
