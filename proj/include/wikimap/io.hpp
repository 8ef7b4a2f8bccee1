#pragma once

#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace wikimap {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Pull-style byte stream. read() returns 0 only at end of input.
class ByteSource {
  public:
    virtual ~ByteSource() = default;
    virtual std::size_t read(char* buf, std::size_t n) = 0;
};

class FileSource final : public ByteSource {
  public:
    explicit FileSource(const std::string& path) : file_(std::fopen(path.c_str(), "rb")) {
        if (file_ == nullptr) throw IoError("cannot open " + path);
    }
    ~FileSource() override {
        if (file_ != nullptr) std::fclose(file_);
    }
    FileSource(const FileSource&) = delete;
    FileSource& operator=(const FileSource&) = delete;

    std::size_t read(char* buf, std::size_t n) override {
        std::size_t got = std::fread(buf, 1, n, file_);
        if (got < n && std::ferror(file_) != 0) throw IoError("read error");
        return got;
    }

  private:
    std::FILE* file_;
};

class MemorySource final : public ByteSource {
  public:
    explicit MemorySource(std::string data) : data_(std::move(data)) {}

    std::size_t read(char* buf, std::size_t n) override {
        std::size_t avail = data_.size() - pos_;
        std::size_t take = n < avail ? n : avail;
        std::memcpy(buf, data_.data() + pos_, take);
        pos_ += take;
        return take;
    }

  private:
    std::string data_;
    std::size_t pos_ = 0;
};

// Serves a short prefix (already consumed for sniffing) before the rest
// of the wrapped stream.
class PrefixSource final : public ByteSource {
  public:
    PrefixSource(std::string prefix, std::unique_ptr<ByteSource> inner)
        : prefix_(std::move(prefix)), inner_(std::move(inner)) {}

    std::size_t read(char* buf, std::size_t n) override {
        if (pos_ < prefix_.size()) {
            std::size_t avail = prefix_.size() - pos_;
            std::size_t take = n < avail ? n : avail;
            std::memcpy(buf, prefix_.data() + pos_, take);
            pos_ += take;
            return take;
        }
        return inner_->read(buf, n);
    }

  private:
    std::string prefix_;
    std::size_t pos_ = 0;
    std::unique_ptr<ByteSource> inner_;
};

}  // namespace wikimap
