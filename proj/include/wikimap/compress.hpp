#pragma once

// Transparent decompression for dump files. The format is detected from
// magic bytes: 1f 8b for gzip, "BZh" for bzip2, anything else passes
// through untouched.

#include <memory>
#include <string>
#include <utility>

#include <zlib.h>

#include "wikimap/io.hpp"

#if defined(WIKIMAP_HAVE_BZ2)
#if __has_include(<bzlib.h>)
#include <bzlib.h>
#else
// No development header on this system; the 1.0 ABI is stable, declare the
// handful of symbols the decompressor needs.
extern "C" {
typedef struct {
    char* next_in;
    unsigned int avail_in;
    unsigned int total_in_lo32;
    unsigned int total_in_hi32;
    char* next_out;
    unsigned int avail_out;
    unsigned int total_out_lo32;
    unsigned int total_out_hi32;
    void* state;
    void* (*bzalloc)(void*, int, int);
    void (*bzfree)(void*, void*);
    void* opaque;
} bz_stream;
int BZ2_bzDecompressInit(bz_stream* strm, int verbosity, int small);
int BZ2_bzDecompress(bz_stream* strm);
int BZ2_bzDecompressEnd(bz_stream* strm);
}
#ifndef BZ_OK
#define BZ_OK 0
#define BZ_STREAM_END 4
#endif
#endif
#endif  // WIKIMAP_HAVE_BZ2

namespace wikimap {

enum class Compression { None, Gzip, Bzip2 };

inline Compression detect_compression(std::string_view magic) {
    if (magic.size() >= 2 && static_cast<unsigned char>(magic[0]) == 0x1f &&
        static_cast<unsigned char>(magic[1]) == 0x8b)
        return Compression::Gzip;
    if (magic.size() >= 3 && magic[0] == 'B' && magic[1] == 'Z' && magic[2] == 'h')
        return Compression::Bzip2;
    return Compression::None;
}

class GzipSource final : public ByteSource {
  public:
    explicit GzipSource(std::unique_ptr<ByteSource> inner) : inner_(std::move(inner)) {
        zs_.zalloc = nullptr;
        zs_.zfree = nullptr;
        zs_.opaque = nullptr;
        zs_.next_in = nullptr;
        zs_.avail_in = 0;
        if (inflateInit2(&zs_, 15 + 32) != Z_OK) throw IoError("gzip: inflateInit failed");
        alive_ = true;
    }
    ~GzipSource() override {
        if (alive_) inflateEnd(&zs_);
    }
    GzipSource(const GzipSource&) = delete;
    GzipSource& operator=(const GzipSource&) = delete;

    std::size_t read(char* buf, std::size_t n) override {
        if (done_) return 0;
        zs_.next_out = reinterpret_cast<Bytef*>(buf);
        zs_.avail_out = static_cast<uInt>(n);
        while (zs_.avail_out > 0) {
            if (zs_.avail_in == 0 && !input_eof_) {
                in_len_ = inner_->read(in_buf_, sizeof(in_buf_));
                input_eof_ = in_len_ == 0;
                zs_.next_in = reinterpret_cast<Bytef*>(in_buf_);
                zs_.avail_in = static_cast<uInt>(in_len_);
            }
            int rc = inflate(&zs_, Z_NO_FLUSH);
            if (rc == Z_STREAM_END) {
                // Concatenated gzip members are a single logical stream.
                if (zs_.avail_in == 0 && !input_eof_) {
                    in_len_ = inner_->read(in_buf_, sizeof(in_buf_));
                    input_eof_ = in_len_ == 0;
                    zs_.next_in = reinterpret_cast<Bytef*>(in_buf_);
                    zs_.avail_in = static_cast<uInt>(in_len_);
                }
                if (zs_.avail_in == 0) {
                    done_ = true;
                    break;
                }
                if (inflateReset(&zs_) != Z_OK) throw IoError("gzip: inflateReset failed");
            } else if (rc == Z_BUF_ERROR) {
                if (input_eof_) throw IoError("gzip: truncated stream");
            } else if (rc != Z_OK) {
                throw IoError(std::string("gzip: ") + (zs_.msg != nullptr ? zs_.msg : "corrupt stream"));
            }
        }
        return n - zs_.avail_out;
    }

  private:
    std::unique_ptr<ByteSource> inner_;
    z_stream zs_{};
    char in_buf_[1 << 16];
    std::size_t in_len_ = 0;
    bool input_eof_ = false;
    bool done_ = false;
    bool alive_ = false;
};

#if defined(WIKIMAP_HAVE_BZ2)
class Bzip2Source final : public ByteSource {
  public:
    explicit Bzip2Source(std::unique_ptr<ByteSource> inner) : inner_(std::move(inner)) {
        init();
    }
    ~Bzip2Source() override {
        if (alive_) BZ2_bzDecompressEnd(&bs_);
    }
    Bzip2Source(const Bzip2Source&) = delete;
    Bzip2Source& operator=(const Bzip2Source&) = delete;

    std::size_t read(char* buf, std::size_t n) override {
        if (done_) return 0;
        bs_.next_out = buf;
        bs_.avail_out = static_cast<unsigned>(n);
        while (bs_.avail_out > 0) {
            if (bs_.avail_in == 0 && !input_eof_) {
                in_len_ = inner_->read(in_buf_, sizeof(in_buf_));
                input_eof_ = in_len_ == 0;
                bs_.next_in = in_buf_;
                bs_.avail_in = static_cast<unsigned>(in_len_);
            }
            if (bs_.avail_in == 0 && input_eof_) throw IoError("bzip2: truncated stream");
            int rc = BZ2_bzDecompress(&bs_);
            if (rc == BZ_STREAM_END) {
                // pbzip2 and friends emit back-to-back streams.
                char* next_in = bs_.next_in;
                unsigned avail_in = bs_.avail_in;
                char* next_out = bs_.next_out;
                unsigned avail_out = bs_.avail_out;
                BZ2_bzDecompressEnd(&bs_);
                alive_ = false;
                if (avail_in == 0 && !input_eof_) {
                    in_len_ = inner_->read(in_buf_, sizeof(in_buf_));
                    input_eof_ = in_len_ == 0;
                    next_in = in_buf_;
                    avail_in = static_cast<unsigned>(in_len_);
                }
                if (avail_in == 0) {
                    done_ = true;
                    break;
                }
                init();
                bs_.next_in = next_in;
                bs_.avail_in = avail_in;
                bs_.next_out = next_out;
                bs_.avail_out = avail_out;
            } else if (rc != BZ_OK) {
                throw IoError("bzip2: corrupt stream (code " + std::to_string(rc) + ")");
            }
        }
        return n - bs_.avail_out;
    }

  private:
    void init() {
        bs_ = bz_stream{};
        if (BZ2_bzDecompressInit(&bs_, 0, 0) != BZ_OK)
            throw IoError("bzip2: decompress init failed");
        alive_ = true;
    }

    std::unique_ptr<ByteSource> inner_;
    bz_stream bs_{};
    char in_buf_[1 << 16];
    std::size_t in_len_ = 0;
    bool input_eof_ = false;
    bool done_ = false;
    bool alive_ = false;
};
#endif  // WIKIMAP_HAVE_BZ2

// Sniffs the stream head and wraps it in the matching decompressor.
inline std::unique_ptr<ByteSource> wrap_decompress(std::unique_ptr<ByteSource> raw) {
    char head[4];
    std::size_t got = 0;
    while (got < sizeof(head)) {
        std::size_t r = raw->read(head + got, sizeof(head) - got);
        if (r == 0) break;
        got += r;
    }
    std::string prefix(head, got);
    auto rewound = std::make_unique<PrefixSource>(prefix, std::move(raw));
    switch (detect_compression(prefix)) {
        case Compression::Gzip:
            return std::make_unique<GzipSource>(std::move(rewound));
        case Compression::Bzip2:
#if defined(WIKIMAP_HAVE_BZ2)
            return std::make_unique<Bzip2Source>(std::move(rewound));
#else
            throw IoError("bzip2 input detected but bzip2 support is not built in");
#endif
        case Compression::None:
            break;
    }
    return rewound;
}

inline std::unique_ptr<ByteSource> open_input(const std::string& path) {
    return wrap_decompress(std::make_unique<FileSource>(path));
}

}  // namespace wikimap
