#include "dec/mesh_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "dec/errors.hpp"

namespace dec {

namespace {

// Next non-empty, non-comment line; returns false at end of input.
bool next_line(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

}  // namespace

SimplicialComplex2 read_off(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!next_line(in, line, line_no)) throw ParseError("empty input", line_no);
  std::istringstream header(line);
  std::string tag;
  header >> tag;
  if (tag != "OFF") throw ParseError("expected OFF header, got '" + tag + "'", line_no);

  std::size_t nv = 0, nf = 0, ne = 0;
  // Counts may share the header line.
  if (!(header >> nv >> nf)) {
    if (!next_line(in, line, line_no)) throw ParseError("missing counts line", line_no);
    std::istringstream counts(line);
    if (!(counts >> nv >> nf)) throw ParseError("malformed counts line", line_no);
    counts >> ne;
  }

  std::vector<Point3> nodes(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    if (!next_line(in, line, line_no)) throw ParseError("unexpected end of vertex list", line_no);
    std::istringstream row(line);
    double x, y, z;
    if (!(row >> x >> y >> z)) throw ParseError("malformed vertex line", line_no);
    nodes[i] = Point3(x, y, z);
  }
  std::vector<Triangle> tris(nf);
  for (std::size_t i = 0; i < nf; ++i) {
    if (!next_line(in, line, line_no)) throw ParseError("unexpected end of face list", line_no);
    std::istringstream row(line);
    int arity = 0;
    if (!(row >> arity)) throw ParseError("malformed face line", line_no);
    if (arity != 3) throw ParseError("only triangle faces are supported (got " + std::to_string(arity) + ")", line_no);
    long long a, b, c;
    if (!(row >> a >> b >> c)) throw ParseError("malformed face indices", line_no);
    if (a < 0 || b < 0 || c < 0 || a >= static_cast<long long>(nv) || b >= static_cast<long long>(nv) ||
        c >= static_cast<long long>(nv))
      throw ParseError("face index out of range", line_no);
    tris[i] = {static_cast<Index>(a), static_cast<Index>(b), static_cast<Index>(c)};
  }
  return SimplicialComplex2::build(std::move(nodes), std::move(tris));
}

SimplicialComplex2 read_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_off(in);
}

void write_off(const SimplicialComplex2& mesh, std::ostream& out) {
  out << "OFF\n" << mesh.num_nodes() << ' ' << mesh.num_triangles() << ' ' << mesh.num_edges() << '\n';
  for (const auto& p : mesh.nodes()) out << fmt::format("{:.17g} {:.17g} {:.17g}\n", p.x(), p.y(), p.z());
  for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

void write_mesh(const SimplicialComplex2& mesh, const std::filesystem::path& path) {
  std::ostringstream s;
  write_off(mesh, s);
  write_file_atomic(path, s.str());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << contents;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace dec
