#include "isophasal/bracket.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace isophasal {

Bracket read_bracket(std::istream& in) {
  std::string line;
  int line_no = 0;
  int m = 0;
  int k = 0;
  bool have_header = false;
  std::vector<Eigen::MatrixXd> comps;
  auto fail = [&](const std::string& what) {
    std::ostringstream msg;
    msg << "bracket tensor line " << line_no << ": " << what;
    throw std::invalid_argument(msg.str());
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string probe;
    if (!(ls >> probe)) continue;
    ls.clear();
    ls.str(line);
    if (!have_header) {
      if (!(ls >> m >> k) || m < 1 || k < 1) fail("expected header 'm k' with positive integers");
      comps.assign(k, Eigen::MatrixXd::Zero(m, m));
      have_header = true;
      continue;
    }
    int p = 0;
    int i = 0;
    int j = 0;
    double v = 0.0;
    if (!(ls >> p >> i >> j >> v)) fail("expected 'p i j value'");
    std::string extra;
    if (ls >> extra) fail("trailing tokens");
    if (p < 1 || p > k || i < 1 || i > m || j < 1 || j > m) fail("index out of range");
    if (i >= j) fail("entries must have i < j (skew pairs are stored once)");
    comps[p - 1](i - 1, j - 1) = v;
    comps[p - 1](j - 1, i - 1) = -v;
  }
  if (!have_header) throw std::invalid_argument("bracket tensor: missing header");
  return Bracket(comps);
}

Bracket read_bracket_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open bracket file: " + path);
  return read_bracket(in);
}

void write_bracket(std::ostream& out, const Bracket& b) {
  out << b.m() << ' ' << b.k() << '\n';
  const auto old_prec = out.precision(17);
  for (int p = 0; p < b.k(); ++p)
    for (int i = 0; i < b.m(); ++i)
      for (int j = i + 1; j < b.m(); ++j)
        if (b(p, i, j) != 0.0) out << p + 1 << ' ' << i + 1 << ' ' << j + 1 << ' ' << b(p, i, j) << '\n';
  out.precision(old_prec);
}

}  // namespace isophasal
