#include "nds/sampling/io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>

#include "nds/common/binary_io.hpp"

namespace nds::sampling {

namespace {

constexpr std::uint32_t kDatasetVersion = 1;

}  // namespace

void write_dataset(const std::filesystem::path& path, const Dataset& data) {
  if (data.X.rows() != data.Y.rows() || data.X.cols() != data.Y.cols())
    throw ShapeError("write_dataset: X and Y shapes differ");
  binary::Writer w(path);
  w.magic("NDS1");
  w.put<std::uint32_t>(kDatasetVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(data.meta.case_id));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(data.meta.split));
  w.put<std::uint64_t>(data.X.rows());
  w.put<std::uint64_t>(data.X.cols());
  w.put<std::uint32_t>(data.meta.n_terms);
  w.put<std::uint64_t>(data.meta.seed);
  w.put_span<double>(data.X.storage());
  w.put_span<double>(data.Y.storage());
  w.finish();
}

Dataset read_dataset(const std::filesystem::path& path) {
  binary::Reader r(path);
  r.expect_magic("NDS1");
  const auto version = r.get<std::uint32_t>();
  if (version != kDatasetVersion)
    throw VersionError("dataset version " + std::to_string(version) + " is not supported");
  Dataset d;
  d.meta.case_id = static_cast<CaseId>(r.get<std::uint32_t>());
  d.meta.split = static_cast<Split>(r.get<std::uint32_t>());
  const auto rows = r.get<std::uint64_t>();
  const auto cols = r.get<std::uint64_t>();
  d.meta.n_terms = r.get<std::uint32_t>();
  d.meta.seed = r.get<std::uint64_t>();
  if (cols != 0 && rows > std::numeric_limits<std::uint64_t>::max() / cols)
    throw TruncatedError("dataset header sizes overflow");
  const std::size_t count = rows * cols;
  d.X = MatrixD(rows, cols, r.get_vector<double>(count));
  d.Y = MatrixD(rows, cols, r.get_vector<double>(count));
  if (!r.at_end()) throw FormatError("dataset has trailing bytes after payload");
  return d;
}

void write_norm_stats(const std::filesystem::path& path, const NormStats& stats) {
  binary::Writer w(path);
  w.magic("NST1");
  w.put<std::uint64_t>(stats.size());
  w.put_span<double>(stats.mean);
  w.put_span<double>(stats.var);
  w.put<double>(stats.eps);
  w.finish();
}

NormStats read_norm_stats(const std::filesystem::path& path) {
  binary::Reader r(path);
  r.expect_magic("NST1");
  const auto n = r.get<std::uint64_t>();
  NormStats s;
  s.mean = r.get_vector<double>(n);
  s.var = r.get_vector<double>(n);
  s.eps = r.get<double>();
  return s;
}

void write_sample_csv(const std::filesystem::path& path, const Dataspace& space,
                      const dynamics::HarmonicLoad& load) {
  auto disp_space = space;
  disp_space.response = ResponseKind::displacement;
  auto acc_space = space;
  acc_space.response = ResponseKind::acceleration;
  const auto u = response_row(disp_space, load);
  const auto a = response_row(acc_space, load);
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << "t,p,u,a\n" << std::setprecision(17);
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double t = space.grid.time(k);
    out << t << ',' << load(t) << ',' << u[k] << ',' << a[k] << '\n';
  }
}

}  // namespace nds::sampling
