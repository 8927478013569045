#include "vpocc/image.hpp"

#include "vpocc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace vpocc {

ImageBuffer ImageBuffer::zeros(int width, int height, int channels) {
    ImageBuffer img;
    img.width = width;
    img.height = height;
    img.channels = channels;
    img.data.assign(static_cast<std::size_t>(width) * height * channels, 0.0f);
    return img;
}

DepthMap DepthMap::zeros(int width, int height) {
    DepthMap d;
    d.width = width;
    d.height = height;
    d.meters.assign(static_cast<std::size_t>(width) * height, 0.0f);
    return d;
}

std::int64_t DepthMap::valid_count() const {
    return std::count_if(meters.begin(), meters.end(), [](float m) { return m > 0.0f; });
}

namespace {

std::uint8_t to_byte(float v) {
    const double scaled = std::floor(static_cast<double>(v) * 255.0 + 0.5);
    return static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

ImageBuffer load_pnm(std::ifstream& in, const std::string& path) {
    std::string magic;
    in >> magic;
    const int channels = magic == "P6" ? 3 : 1;
    if (magic != "P5" && magic != "P6") {
        throw IoError("unsupported PNM magic in " + path);
    }
    auto next_token = [&in, &path]() {
        std::string tok;
        while (in >> tok) {
            if (tok[0] == '#') {
                std::string rest;
                std::getline(in, rest);
                continue;
            }
            return tok;
        }
        throw IoError("truncated PNM header in " + path);
    };
    int width = 0, height = 0, maxval = 0;
    try {
        width = std::stoi(next_token());
        height = std::stoi(next_token());
        maxval = std::stoi(next_token());
    } catch (const std::exception&) {
        throw IoError("malformed PNM header in " + path);
    }
    if (width <= 0 || height <= 0 || maxval != 255) {
        throw IoError("unsupported PNM dimensions or maxval in " + path);
    }
    in.get(); // single whitespace after maxval
    ImageBuffer img = ImageBuffer::zeros(width, height, channels);
    std::vector<std::uint8_t> raw(img.size());
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
        throw IoError("truncated PNM pixel data in " + path);
    }
    for (std::size_t i = 0; i < raw.size(); ++i) {
        img.data[i] = static_cast<float>(raw[i]) / 255.0f;
    }
    return img;
}

void save_pnm(const ImageBuffer& img, const std::string& path) {
    if (img.channels != 1 && img.channels != 3) {
        throw IoError("PNM output supports 1 or 3 channels");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    out << (img.channels == 3 ? "P6" : "P5") << "\n"
        << img.width << " " << img.height << "\n255\n";
    std::vector<std::uint8_t> raw(img.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        raw[i] = to_byte(img.data[i]);
    }
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size()));
    if (!out) {
        throw IoError("short write: " + path);
    }
}

std::string lowercase_extension(const std::string& path) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) {
        return "";
    }
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

} // namespace

// PNG paths live in image_png.cpp.
ImageBuffer load_png_rgb8(const std::string& path);
void save_png_rgb8(const ImageBuffer& img, const std::string& path);

ImageBuffer load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open image: " + path);
    }
    char magic[2] = {0, 0};
    in.read(magic, 2);
    in.seekg(0);
    if (magic[0] == 'P' && (magic[1] == '5' || magic[1] == '6')) {
        return load_pnm(in, path);
    }
    if (static_cast<unsigned char>(magic[0]) == 0x89 && magic[1] == 'P') {
        in.close();
        return load_png_rgb8(path);
    }
    throw IoError("unrecognized image format: " + path);
}

void save_image(const ImageBuffer& img, const std::string& path) {
    if (img.width <= 0 || img.height <= 0 || img.size() == 0) {
        throw IoError("refusing to write empty image: " + path);
    }
    const std::string ext = lowercase_extension(path);
    if (ext == "png") {
        save_png_rgb8(img, path);
    } else if (ext == "ppm" || ext == "pgm") {
        save_pnm(img, path);
    } else {
        throw IoError("unsupported image extension: " + path);
    }
}

} // namespace vpocc
