#pragma once

// Output directory bookkeeping: data files, their checksums, manifest.json.

#include <sfocus/snapshot_io.hpp>

#include <json.hpp>
#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace cli {

inline std::string sha256_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned k = 0; k < len; ++k) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[k]);
  return os.str();
}

class Outputs {
public:
  explicit Outputs(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

  const std::filesystem::path& dir() const { return dir_; }

  /// CSV with a header row; `rows` is called with the stream to fill.
  template <class F>
  void csv(const std::string& name, const std::string& header, F&& rows) {
    std::ofstream os(dir_ / name);
    os << std::setprecision(17);
    os << header << '\n';
    rows(os);
    finish(name, os);
  }

  void sfq1(const std::string& name, std::span<const sfocus::cplx> values) {
    sfocus::write_sfq1(dir_ / name, values);
    files_.push_back(name);
  }

  void json_file(const std::string& name, const nlohmann::json& j) {
    std::ofstream os(dir_ / name);
    os << j.dump(2) << '\n';
    finish(name, os);
  }

  nlohmann::json file_table() const {
    nlohmann::json t = nlohmann::json::array();
    for (const auto& f : files_)
      t.push_back({{"name", f}, {"bytes", std::filesystem::file_size(dir_ / f)}, {"sha256", sha256_file(dir_ / f)}});
    return t;
  }

private:
  void finish(const std::string& name, std::ofstream& os) {
    os.close();
    if (!os) throw std::runtime_error("write failed: " + (dir_ / name).string());
    files_.push_back(name);
  }

  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

} // namespace cli
