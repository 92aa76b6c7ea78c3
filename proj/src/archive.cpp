#include "mor/archive.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace mor {

namespace {

void append_block(std::string& out, const std::string& name, const SparseMatrix& s) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "block %s %td %td %td\n", name.c_str(), s.rows(), s.cols(),
                static_cast<std::ptrdiff_t>(s.nonZeros()));
  out += buf;
  for (Index i = 0; i < s.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(s, i); it; ++it) {
      std::snprintf(buf, sizeof buf, "%td %td %.17g\n", it.row(), it.col(), it.value());
      out += buf;
    }
  }
}

SparseMatrix dense_to_sparse(const DenseMatrix& m) { return m.sparseView(0.0, 0.0); }

[[noreturn]] void malformed(const std::string& why) {
  throw Error(ErrorCode::kIo, "archive malformed: " + why);
}

struct Reader {
  std::istringstream in;

  std::string line() {
    std::string l;
    if (!std::getline(in, l)) malformed("unexpected end of file");
    return l;
  }

  SparseMatrix block(const std::string& expected) {
    std::istringstream head(line());
    std::string tag;
    std::string name;
    Index rows = 0;
    Index cols = 0;
    Index nnz = 0;
    if (!(head >> tag >> name >> rows >> cols >> nnz) || tag != "block" || name != expected ||
        rows < 0 || cols < 0 || nnz < 0) {
      malformed("expected block " + expected);
    }
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(nnz));
    for (Index k = 0; k < nnz; ++k) {
      std::istringstream entry(line());
      Index i = 0;
      Index j = 0;
      std::string value;
      if (!(entry >> i >> j >> value) || i < 0 || j < 0 || i >= rows || j >= cols) {
        malformed("bad entry in block " + expected);
      }
      char* end = nullptr;
      const double v = std::strtod(value.c_str(), &end);
      if (*end != '\0') malformed("bad value in block " + expected);
      triplets.emplace_back(i, j, v);
    }
    SparseMatrix s(rows, cols);
    s.setFromTriplets(triplets.begin(), triplets.end());
    return s;
  }
};

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string save_model(const std::filesystem::path& path, const LtiModel& model,
                       const std::map<std::string, std::string>& metadata) {
  std::string body = "mor-archive " + std::to_string(kArchiveVersion) + "\n";
  body += "dims " + std::to_string(model.order()) + " " + std::to_string(model.num_inputs()) + " " +
          std::to_string(model.num_outputs()) + " " + std::to_string(model.num_parameters()) + "\n";
  for (const auto& [key, value] : metadata) {
    if (key.empty() || key.find_first_of(" \n") != std::string::npos ||
        value.find('\n') != std::string::npos) {
      throw Error(ErrorCode::kInvalidInput, "archive metadata keys must be single words");
    }
    body += "meta " + key + " " + value + "\n";
  }
  append_block(body, "E", model.e().to_sparse());
  append_block(body, "A0", model.a().constant_term().to_sparse());
  for (std::size_t i = 0; i < model.a().parametric_terms().size(); ++i) {
    append_block(body, "A" + std::to_string(i + 1), model.a().parametric_terms()[i].to_sparse());
  }
  append_block(body, "B", dense_to_sparse(model.b()));
  append_block(body, "C", dense_to_sparse(model.c()));
  if (!model.energy_product().is_identity()) {
    append_block(body, "M", model.energy_product().matrix().to_sparse());
  }
  const std::string checksum = fnv1a_hex(body);

  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out << body << "checksum " << checksum << "\n";
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot move archive into place: " + ec.message());
  return checksum;
}

ArchivedModel load_model(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << file.rdbuf();
  const std::string text = buffer.str();

  const auto tail = text.rfind("checksum ");
  if (tail == std::string::npos || (tail > 0 && text[tail - 1] != '\n')) malformed("missing checksum");
  const std::string body = text.substr(0, tail);
  std::string stored = text.substr(tail + 9);
  while (!stored.empty() && (stored.back() == '\n' || stored.back() == '\r')) stored.pop_back();
  const std::string actual = fnv1a_hex(body);
  if (stored != actual) {
    throw Error(ErrorCode::kIo, "archive checksum mismatch (stored " + stored + ", computed " + actual + ")");
  }

  Reader r{std::istringstream(body)};
  {
    std::istringstream head(r.line());
    std::string magic;
    int version = 0;
    if (!(head >> magic >> version) || magic != "mor-archive") malformed("bad header");
    if (version != kArchiveVersion) {
      throw Error(ErrorCode::kIo, "unsupported archive version " + std::to_string(version));
    }
  }
  Index n = 0;
  Index m = 0;
  Index p = 0;
  Index d = 0;
  {
    std::istringstream dims(r.line());
    std::string tag;
    if (!(dims >> tag >> n >> m >> p >> d) || tag != "dims" || n < 0 || m < 0 || p < 0 || d < 0) {
      malformed("bad dims");
    }
  }
  std::map<std::string, std::string> metadata;
  while (r.in.peek() == 'm') {
    const std::string l = r.line();
    if (l.rfind("meta ", 0) != 0) malformed("unexpected record");
    const auto space = l.find(' ', 5);
    if (space == std::string::npos) {
      metadata[l.substr(5)] = "";
    } else {
      metadata[l.substr(5, space - 5)] = l.substr(space + 1);
    }
  }

  SparseMatrix e = r.block("E");
  SparseMatrix a0 = r.block("A0");
  std::vector<Operator> terms;
  for (Index i = 1; i <= d; ++i) terms.emplace_back(r.block("A" + std::to_string(i)));
  const DenseMatrix b(r.block("B"));
  const DenseMatrix c(r.block("C"));
  InnerProduct energy;
  if (r.in.peek() == 'b') energy = InnerProduct(Operator(r.block("M")));
  if (e.rows() != n || b.cols() != m || c.rows() != p) malformed("dims disagree with blocks");

  return ArchivedModel{LtiModel(Operator(std::move(e)), AffineMatrix(Operator(std::move(a0)), std::move(terms)), b, c,
                                std::move(energy)),
                       std::move(metadata), actual};
}

}  // namespace mor
