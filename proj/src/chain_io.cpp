#include "ergo/chain_io.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>

namespace ergo {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

FiniteChain load_chain(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("chain JSON parse error: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("kernel"))
    throw std::invalid_argument("chain JSON must be an object with a \"kernel\" key");
  const json& rows = doc["kernel"];
  if (!rows.is_array() || rows.empty())
    throw std::invalid_argument("\"kernel\" must be a nonempty array of rows");
  const int n = static_cast<int>(rows.size());
  Eigen::MatrixXd P(n, n);
  for (int x = 0; x < n; ++x) {
    const json& row = rows[static_cast<size_t>(x)];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      std::ostringstream os;
      os << "kernel row " << x << " must be an array of length " << n;
      throw std::invalid_argument(os.str());
    }
    for (int y = 0; y < n; ++y) {
      const json& v = row[static_cast<size_t>(y)];
      if (!v.is_number()) {
        std::ostringstream os;
        os << "kernel entry (" << x << "," << y << ") is not a number";
        throw std::invalid_argument(os.str());
      }
      P(x, y) = v.get<double>();
    }
  }
  std::vector<std::string> labels;
  if (doc.contains("labels")) {
    const json& ls = doc["labels"];
    if (!ls.is_array() || static_cast<int>(ls.size()) != n)
      throw std::invalid_argument("\"labels\" must be an array matching the kernel size");
    for (const auto& l : ls) {
      if (!l.is_string())
        throw std::invalid_argument("\"labels\" entries must be strings");
      labels.push_back(l.get<std::string>());
    }
  }
  return FiniteChain(std::move(P), std::move(labels));
}

FiniteChain load_chain_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open chain file: " + path);
  return load_chain(in);
}

std::string chain_to_json(const FiniteChain& chain) {
  ordered_json doc;
  if (!chain.labels().empty()) doc["labels"] = chain.labels();
  ordered_json rows = ordered_json::array();
  for (int x = 0; x < chain.n_states(); ++x) {
    ordered_json row = ordered_json::array();
    for (int y = 0; y < chain.n_states(); ++y) row.push_back(chain.kernel()(x, y));
    rows.push_back(std::move(row));
  }
  doc["kernel"] = std::move(rows);
  return doc.dump(2);
}

void save_chain_file(const FiniteChain& chain, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  out << chain_to_json(chain) << '\n';
}

}  // namespace ergo
