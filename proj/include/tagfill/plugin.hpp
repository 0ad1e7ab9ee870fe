#pragma once

// External model plugins speak JSON lines: the toolkit writes one request
// object per line, each carrying an integer "id", and reads one response per
// line in any order. A plugin is either a shell command (requests on stdin,
// responses on stdout) or a precomputed response file.

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tagfill/error.hpp"
#include "tagfill/io.hpp"

namespace tagfill {

class PluginChannel {
 public:
  enum class Mode { kCommand, kFile };

  PluginChannel(Mode mode, std::string target)
      : mode_(mode), target_(std::move(target)) {}

  static PluginChannel command(std::string cmd) {
    return {Mode::kCommand, std::move(cmd)};
  }
  static PluginChannel response_file(std::string path) {
    return {Mode::kFile, std::move(path)};
  }

  // Sends all requests and returns responses keyed by id. Each request must
  // carry a distinct integer "id"; every id must be answered exactly once.
  std::map<std::size_t, io::json> exchange(const std::vector<io::json>& requests) const {
    const std::lock_guard<std::mutex> lock(*mutex_);
    const std::string content = mode_ == Mode::kFile ? io::read_file(target_)
                                                     : run_command(requests);
    const std::string name = mode_ == Mode::kFile ? target_ : "plugin `" + target_ + "`";

    std::map<std::size_t, io::json> responses;
    const auto lines = io::split_lines(content);
    for (std::size_t k = 0; k < lines.size(); ++k) {
      if (lines[k].find_first_not_of(" \t") == std::string::npos) continue;
      const std::string where = name + " response line " + std::to_string(k + 1);
      io::json value = io::json::parse(lines[k], nullptr, false);
      if (value.is_discarded()) fail(ErrorKind::kProtocol, where + ": malformed JSON");
      if (io::is_meta_record(value)) continue;
      if (!value.is_object() || !value.contains("id") || !value["id"].is_number_unsigned()) {
        fail(ErrorKind::kProtocol, where + ": missing non-negative integer \"id\"");
      }
      const auto id = value["id"].get<std::size_t>();
      value["_line"] = k + 1;
      if (!responses.emplace(id, std::move(value)).second) {
        fail(ErrorKind::kProtocol, where + ": duplicate id " + std::to_string(id));
      }
    }
    for (const auto& request : requests) {
      const auto id = request.at("id").get<std::size_t>();
      if (!responses.contains(id)) {
        fail(ErrorKind::kProtocol, name + ": no response for id " + std::to_string(id));
      }
    }
    return responses;
  }

  const std::string& target() const { return target_; }

 private:
  std::string run_command(const std::vector<io::json>& requests) const {
    static std::atomic<unsigned long> counter{0};
    const auto dir = std::filesystem::temp_directory_path();
    const std::string stem = "tagfill-" + std::to_string(::getpid()) + "-" +
                             std::to_string(counter++);
    const auto request_path = dir / (stem + ".in.jsonl");
    const auto response_path = dir / (stem + ".out.jsonl");
    struct Cleanup {
      std::filesystem::path a, b;
      ~Cleanup() {
        std::error_code ec;
        std::filesystem::remove(a, ec);
        std::filesystem::remove(b, ec);
      }
    } cleanup{request_path, response_path};

    std::string payload;
    for (const auto& r : requests) payload += io::dump_line(r);
    io::write_file(request_path, payload);

    const std::string shell = "(" + target_ + ") < '" + request_path.string() +
                              "' > '" + response_path.string() + "'";
    const int status = std::system(shell.c_str());
    if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      const int code = (status != -1 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
      fail(ErrorKind::kProtocol, "plugin `" + target_ + "` exited with status " +
                                     std::to_string(code));
    }
    return io::read_file(response_path);
  }

  Mode mode_;
  std::string target_;
  // Invocations of one plugin instance are serialized.
  std::shared_ptr<std::mutex> mutex_ = std::make_shared<std::mutex>();
};

inline std::string response_where(const PluginChannel& channel, const io::json& response) {
  return "plugin `" + channel.target() + "` response line " +
         std::to_string(response.value("_line", std::size_t{0}));
}

}  // namespace tagfill
