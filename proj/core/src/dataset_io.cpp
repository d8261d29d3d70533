#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "vectormaton/bench.hpp"

namespace vectormaton {

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b.data(), 4);
}

// Returns false on clean EOF before the first byte; throws on a partial read.
bool get_u32(std::istream& in, std::uint32_t& v, std::size_t record, bool eof_ok) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), 4);
  if (in.gcount() == 0 && eof_ok) return false;
  if (in.gcount() != 4) {
    throw FormatError("vector file: truncated at record " + std::to_string(record));
  }
  v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return true;
}

}  // namespace

void write_vectors(std::ostream& out, const VectorStore& vectors) {
  const auto dim = static_cast<std::uint32_t>(vectors.dim());
  for (VectorId id = 1; id <= vectors.size(); ++id) {
    put_u32(out, dim);
    for (float f : vectors[id]) put_u32(out, std::bit_cast<std::uint32_t>(f));
  }
}

VectorStore read_vectors(std::istream& in) {
  VectorStore store;
  std::vector<float> row;
  for (std::size_t record = 0;; ++record) {
    std::uint32_t dim = 0;
    if (!get_u32(in, dim, record, true)) break;
    if (dim == 0) throw FormatError("vector file: zero dimension at record " + std::to_string(record));
    if (store.dim() != 0 && dim != store.dim()) {
      throw FormatError("vector file: inconsistent dimension " + std::to_string(dim) +
                        " at record " + std::to_string(record) + " (expected " +
                        std::to_string(store.dim()) + ")");
    }
    row.resize(dim);
    for (auto& f : row) {
      std::uint32_t bits = 0;
      get_u32(in, bits, record, false);
      f = std::bit_cast<float>(bits);
    }
    store.push_back(row);
  }
  return store;
}

void write_sequences(std::ostream& out, std::span<const std::string> sequences) {
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    if (sequences[i].find('\n') != std::string::npos) {
      throw FormatError("sequence " + std::to_string(i) + " contains a line feed");
    }
    out.write(sequences[i].data(), static_cast<std::streamsize>(sequences[i].size()));
    out.put('\n');
  }
}

std::vector<std::string> read_sequences(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

Dataset load_dataset(const std::string& vectors_path, const std::string& sequences_path) {
  std::ifstream vin(vectors_path, std::ios::binary);
  if (!vin) throw FormatError("cannot open vector file " + vectors_path);
  std::ifstream sin(sequences_path, std::ios::binary);
  if (!sin) throw FormatError("cannot open sequence file " + sequences_path);
  Dataset d;
  d.vectors = read_vectors(vin);
  d.sequences = read_sequences(sin);
  if (d.vectors.size() != d.sequences.size()) {
    throw FormatError("count mismatch: " + std::to_string(d.vectors.size()) + " vectors, " +
                      std::to_string(d.sequences.size()) + " sequences (first unpaired record " +
                      std::to_string(std::min(d.vectors.size(), d.sequences.size())) + ")");
  }
  return d;
}

void save_dataset(const Dataset& dataset, const std::string& vectors_path,
                  const std::string& sequences_path) {
  dataset.validate();
  std::ofstream vout(vectors_path, std::ios::binary | std::ios::trunc);
  if (!vout) throw std::runtime_error("cannot open " + vectors_path + " for writing");
  write_vectors(vout, dataset.vectors);
  std::ofstream sout(sequences_path, std::ios::binary | std::ios::trunc);
  if (!sout) throw std::runtime_error("cannot open " + sequences_path + " for writing");
  write_sequences(sout, dataset.sequences);
}

}  // namespace vectormaton
