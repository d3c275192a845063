#include <cctype>
#include <cstdlib>
#include <fstream>

#ifdef ZIPFORM_HAVE_OPENSSL
#include <httplib.h>
#endif

#include "zipform/errors.hpp"
#include "zipform/fibril.hpp"

namespace zipform {

namespace {

constexpr const char* kArchiveHost = "files.rcsb.org";

bool looks_like_structure(const std::string& body) {
    return body.size() >= 200 && body.find("ATOM") != std::string::npos;
}

}  // namespace

std::filesystem::path default_cache_dir() {
    if (const char* dir = std::getenv("ZIPFORM_CACHE_DIR")) return dir;
    if (const char* xdg = std::getenv("XDG_CACHE_HOME"))
        return std::filesystem::path(xdg) / "zipform";
    if (const char* home = std::getenv("HOME"))
        return std::filesystem::path(home) / ".cache" / "zipform";
    return ".zipform-cache";
}

std::filesystem::path fetch_template(const std::string& id,
                                     const std::filesystem::path& cache_dir,
                                     int timeout_seconds) {
    if (id.size() != 4)
        throw ArgumentError("structure id must be 4 characters, got '" + id + "'");
    std::string upper;
    for (char c : id) {
        if (!std::isalnum(static_cast<unsigned char>(c)))
            throw ArgumentError("structure id must be alphanumeric, got '" + id + "'");
        upper += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }

    std::filesystem::path path = cache_dir / (upper + ".pdb");
    std::error_code ec;
    if (std::filesystem::exists(path, ec) && std::filesystem::file_size(path, ec) > 0)
        return path;  // cache hit: no network

#ifndef ZIPFORM_HAVE_OPENSSL
    throw NetworkError("built without TLS support; download " + upper +
                       ".pdb manually and pass it with --template");
#else
    httplib::SSLClient client(kArchiveHost);
    client.set_connection_timeout(timeout_seconds, 0);
    client.set_read_timeout(timeout_seconds, 0);
    client.set_follow_location(true);

    auto res = client.Get(("/download/" + upper + ".pdb").c_str());
    if (!res)
        throw NetworkError("could not reach " + std::string(kArchiveHost) +
                           " (" + httplib::to_string(res.error()) +
                           "); pass a local file with --template to run offline");
    if (res->status == 404)
        throw NetworkError("structure " + upper + " not found (HTTP 404)");
    if (res->status != 200)
        throw NetworkError("download of " + upper + " failed (HTTP " +
                           std::to_string(res->status) + ")");
    if (!looks_like_structure(res->body))
        throw NetworkError("download of " + upper +
                           " looks corrupt (no ATOM records); not cached");

    std::filesystem::create_directories(cache_dir, ec);
    std::filesystem::path tmp = path;
    tmp += ".part";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << res->body;
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move download into place: " + ec.message());
    return path;
#endif
}

}  // namespace zipform
