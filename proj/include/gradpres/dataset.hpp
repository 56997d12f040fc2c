#pragma once

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include "image_io.hpp"
#include "synth.hpp"

namespace gradpres {

struct ManifestEntry {
    std::filesystem::path relative_path;
    int class_id = 0;
    ImageFormat format = ImageFormat::PGM;
};

struct SkippedFile {
    std::filesystem::path relative_path;
    std::string reason;
};

/// Directory-per-identity dataset: root/<identity>/<image>.{pgm,png}.
/// Identities are sorted lexicographically; class ids count up from 0 over
/// identities that contributed at least one readable image.
struct DatasetManifest {
    std::filesystem::path root;
    std::vector<std::string> class_names;
    std::vector<ManifestEntry> entries;
    std::vector<SkippedFile> skipped;
};

struct LoadedDataset {
    DatasetManifest manifest;
    std::vector<LabeledImage> images; // parallel to manifest.entries
};

struct DatasetOptions {
    /// Files whose name contains any of these substrings are ignored.
    std::vector<std::string> exclude;
};

inline bool is_image_file(const std::filesystem::path& p) {
    try {
        format_for_path(p);
        return true;
    } catch (const IoError&) {
        return false;
    }
}

/// Reads every image under `root`. Unreadable or undersized images are
/// skipped, listed in manifest.skipped, and reported through `warn`.
inline LoadedDataset load_dataset(const std::filesystem::path& root,
                                  const DatasetOptions& opts = {},
                                  const WarningSink& warn = warn_stderr) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) throw IoError(root.string(), "dataset root is not a directory");

    std::vector<fs::path> identities;
    for (const auto& e : fs::directory_iterator(root)) {
        if (e.is_directory()) identities.push_back(e.path());
    }
    std::sort(identities.begin(), identities.end());

    LoadedDataset out;
    out.manifest.root = root;
    for (const auto& dir : identities) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(dir)) {
            if (!e.is_regular_file() || !is_image_file(e.path())) continue;
            const std::string name = e.path().filename().string();
            const bool excluded = std::any_of(opts.exclude.begin(), opts.exclude.end(),
                                              [&](const std::string& s) {
                                                  return !s.empty() && name.find(s) != std::string::npos;
                                              });
            if (!excluded) files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());

        const int class_id = int(out.manifest.class_names.size());
        bool any = false;
        for (const auto& f : files) {
            const fs::path rel = fs::relative(f, root);
            try {
                GrayImage img = load_image(f, warn);
                out.images.push_back({std::move(img), class_id});
                out.manifest.entries.push_back({rel, class_id, format_for_path(f)});
                any = true;
            } catch (const Error& e) {
                warn("skipping " + rel.string() + ": " + e.what());
                out.manifest.skipped.push_back({rel, e.what()});
            }
        }
        if (any) out.manifest.class_names.push_back(dir.filename().string());
    }
    if (out.images.empty()) throw IoError(root.string(), "no readable images found");
    return out;
}

/// Writes a dataset in the layout load_dataset reads:
/// dir/class_XX/img_YYYY.pgm.
inline void write_dataset(const std::vector<LabeledImage>& images,
                          const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<int> counter;
    char name[64];
    for (const auto& li : images) {
        if (std::size_t(li.label) >= counter.size()) counter.resize(std::size_t(li.label) + 1, 0);
        std::snprintf(name, sizeof name, "class_%02d", li.label);
        const fs::path cls = dir / name;
        fs::create_directories(cls);
        std::snprintf(name, sizeof name, "img_%04d.pgm", counter[std::size_t(li.label)]++);
        save_image(li.image, cls / name);
    }
}

} // namespace gradpres
