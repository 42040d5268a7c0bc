#include <curl/curl.h>
#include <openssl/evp.h>
#include <zlib.h>

#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "arcenv/errors.hpp"
#include "arcenv/tasks.hpp"

namespace arcenv {

namespace fs = std::filesystem;

namespace {

// Digests are left empty until pinned by whoever mirrors the archives.
constexpr const char* kDefaultTable = R"(
- name: miniarc
  url: https://github.com/ksb21ST/Mini-ARC/archive/refs/heads/main.tar.gz
  sha256: ""
  directory: MiniARC
  strip_prefix: Mini-ARC-main/data/MiniARC
- name: arc-agi-1
  url: https://github.com/fchollet/ARC-AGI/archive/refs/heads/master.tar.gz
  sha256: ""
  directory: ARC-AGI-1
  strip_prefix: ARC-AGI-master/data
- name: arc-agi-2
  url: https://github.com/arcprize/ARC-AGI-2/archive/refs/heads/main.tar.gz
  sha256: ""
  directory: ARC-AGI-2
  strip_prefix: ARC-AGI-2-main/data
)";

constexpr const char* kCompleteMarker = ".arcenv-complete";

std::size_t on_body(char* data, std::size_t size, std::size_t n, void* user) {
  static_cast<std::string*>(user)->append(data, size * n);
  return size * n;
}

std::string download(const std::string& url) {
  CURL* curl = curl_easy_init();
  if (!curl) throw Error(ErrorCode::Network, "curl initialization failed");
  std::string body;
  curl_easy_setopt(curl, CURLOPT_URL, url.c_str());
  curl_easy_setopt(curl, CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(curl, CURLOPT_FAILONERROR, 1L);
  curl_easy_setopt(curl, CURLOPT_WRITEFUNCTION, on_body);
  curl_easy_setopt(curl, CURLOPT_WRITEDATA, &body);
  const CURLcode rc = curl_easy_perform(curl);
  curl_easy_cleanup(curl);
  if (rc != CURLE_OK) throw Error(ErrorCode::Network, url + ": " + curl_easy_strerror(rc));
  return body;
}

std::string gunzip(std::string_view in) {
  z_stream zs{};
  if (inflateInit2(&zs, 15 + 32) != Z_OK) throw Error(ErrorCode::Io, "zlib init failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  std::string out;
  char chunk[1 << 16];
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = reinterpret_cast<Bytef*>(chunk);
    zs.avail_out = sizeof(chunk);
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw Error(ErrorCode::Io, "archive is not valid gzip data");
    }
    out.append(chunk, sizeof(chunk) - zs.avail_out);
  }
  inflateEnd(&zs);
  return out;
}

std::uint64_t octal_field(std::string_view f) {
  std::uint64_t v = 0;
  for (char ch : f) {
    if (ch < '0' || ch > '7') {
      if (ch == ' ' || ch == '\0') continue;
      break;
    }
    v = v * 8 + static_cast<std::uint64_t>(ch - '0');
  }
  return v;
}

std::string cstr_field(std::string_view f) { return std::string(f.substr(0, f.find('\0'))); }

// Rejects absolute paths and parent references so an archive cannot write
// outside the destination.
bool safe_relative(const fs::path& p) {
  if (p.is_absolute()) return false;
  for (const auto& part : p) {
    if (part == "..") return false;
  }
  return true;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

void extract_tar_gz(std::string_view archive, const fs::path& dest, const std::string& strip_prefix) {
  const std::string tar = gunzip(archive);
  const fs::path prefix = fs::path(strip_prefix).lexically_normal();
  std::string long_name;
  std::size_t pos = 0;
  while (pos + 512 <= tar.size()) {
    const std::string_view h(tar.data() + pos, 512);
    if (h.find_first_not_of('\0') == std::string_view::npos) break;
    const std::uint64_t size = octal_field(h.substr(124, 12));
    const char type = h[156];
    std::string name = cstr_field(h.substr(0, 100));
    const std::string ustar_prefix = cstr_field(h.substr(345, 155));
    if (h.substr(257, 5) == "ustar" && !ustar_prefix.empty()) name = ustar_prefix + "/" + name;
    if (!long_name.empty()) {
      name = long_name;
      long_name.clear();
    }
    const std::size_t body = pos + 512;
    if (body + size > tar.size()) throw Error(ErrorCode::Io, "truncated tar archive");
    pos = body + ((size + 511) / 512) * 512;

    if (type == 'L') {
      long_name = cstr_field(std::string_view(tar.data() + body, size));
      continue;
    }
    if (type != '0' && type != '\0' && type != '5') continue;  // pax headers, links

    fs::path rel = fs::path(name).lexically_normal();
    if (!prefix.empty() && prefix != ".") {
      const fs::path r = rel.lexically_relative(prefix);
      if (r.empty() || *r.begin() == "..") continue;
      rel = r;
    }
    if (rel.empty() || rel == "." || !safe_relative(rel)) continue;
    const fs::path out = dest / rel;
    if (type == '5') {
      fs::create_directories(out);
      continue;
    }
    fs::create_directories(out.parent_path());
    std::ofstream f(out, std::ios::binary);
    f.write(tar.data() + body, static_cast<std::streamsize>(size));
    if (!f) throw Error(ErrorCode::Io, "cannot write " + out.string());
  }
}

std::vector<DatasetSource> parse_dataset_table(std::string_view yaml) {
  std::vector<DatasetSource> out;
  try {
    const YAML::Node root = YAML::Load(std::string(yaml));
    if (!root.IsSequence()) throw Error(ErrorCode::InvalidConfig, "dataset table must be a list");
    for (const auto& n : root) {
      DatasetSource s;
      s.name = n["name"].as<std::string>();
      s.url = n["url"].as<std::string>();
      s.sha256 = n["sha256"] ? n["sha256"].as<std::string>() : "";
      s.directory = n["directory"] ? n["directory"].as<std::string>() : s.name;
      s.strip_prefix = n["strip_prefix"] ? n["strip_prefix"].as<std::string>() : "";
      out.push_back(std::move(s));
    }
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("dataset table: ") + e.what());
  }
  return out;
}

std::vector<DatasetSource> default_dataset_table() { return parse_dataset_table(kDefaultTable); }

std::vector<DatasetSource> load_dataset_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_dataset_table(ss.str());
}

fs::path fetch_dataset(const std::string& name, const fs::path& destination, const std::vector<DatasetSource>& table,
                       const FetchOptions& options) {
  const auto it = std::find_if(table.begin(), table.end(), [&](const DatasetSource& s) { return s.name == name; });
  if (it == table.end()) throw Error(ErrorCode::UnknownDataset, "unknown dataset \"" + name + "\"");
  const fs::path dir = destination / it->directory;
  if (fs::is_regular_file(dir / kCompleteMarker)) return dir;

  if (it->sha256.empty() && !options.allow_unpinned) {
    throw Error(ErrorCode::DigestMismatch, "dataset \"" + name + "\" has no pinned sha256; refusing unverified download");
  }
  const std::string archive = download(it->url);
  const std::string digest = sha256_hex(archive);
  if (!it->sha256.empty() && digest != it->sha256) {
    throw Error(ErrorCode::DigestMismatch, "dataset \"" + name + "\": expected sha256 " + it->sha256 + ", got " + digest);
  }
  fs::create_directories(dir);
  extract_tar_gz(archive, dir, it->strip_prefix);
  std::ofstream(dir / kCompleteMarker) << digest << "\n";
  return dir;
}

}  // namespace arcenv
