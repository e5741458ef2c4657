#pragma once

#include <string>
#include <vector>

#include "roomtex/camera.hpp"
#include "roomtex/image.hpp"
#include "roomtex/layout.hpp"
#include "roomtex/math.hpp"
#include "roomtex/texturing.hpp"

namespace roomtex {

// Fixed resolution of plane images: 500 px per meter (2 mm per pixel).
constexpr double kPlanePixelsPerMeter = 500.0;

// Geometry of one room plane, reduced to what the orthographic-style capture
// needs: where the plane sits, which way it faces, and how large the image
// rectangle is. For walls the rectangle is the wall itself; for floor and
// ceiling it is the room's minimum bounding rectangle, so the image covers
// the whole surface even in non-rectangular rooms.
struct PlaneGeometry {
    int planeId = 0;          // wall id, kFloorPlaneId, or kCeilingPlaneId
    Vec3 center;              // rectangle center on the plane
    Vec3 normal;              // unit, pointing into the room
    double widthM = 0.0;      // rectangle extent along the image x axis, m
    double heightM = 0.0;     // rectangle extent along the image y axis, m
    Vec2 mbbAlign{1.0, 0.0};  // horizontal planes: room MBB long-edge direction
};

// Virtual camera that sees exactly one plane rectangle, filling the frame.
struct PlaneCamera {
    CameraIntrinsics K;
    Mat4 camToWorld;
    Vec3 position;
};

// Image of one plane at kPlanePixelsPerMeter, plus a mask of pixels whose
// color came from the untextured sentinel (or from outside the mesh) rather
// than from a captured frame. Those are the pixels later passes may fill in.
struct PlaneImage {
    int planeId = 0;
    Image8 pixels;           // RGB
    Image8 mask;             // 1 channel; 255 = not backed by a real capture
    double metersPerPixel = 1.0 / kPlanePixelsPerMeter;
};

// Rectangle for the given plane of the layout. Walls take their stored
// center/size. Floor and ceiling use the MBB rectangle at floorHeight /
// ceilingHeight; their image y axis runs along the MBB long edge, so
// widthM/heightM come out swapped relative to the MBB's own naming.
PlaneGeometry plane_geometry(const RoomLayout& layout, int planeId);

// Camera whose frame maps the plane rectangle edge-to-edge: resolution
// round(500*widthM) x round(500*heightM), placed heightM/2 in front of the
// rectangle center along the normal. Wall cameras keep +Y up; floor cameras
// look down with up = -mbbAlign, ceiling cameras look up with up = +mbbAlign,
// which keeps all plane images of one room consistently oriented.
PlaneCamera setup_cam(const PlaneGeometry& geom);

// Subset of the atlas containing only faces labeled planeId, with vertices
// compacted; pages carry over unchanged. render_plane draws whatever mesh it
// is given, so callers split first; otherwise geometry from other planes (or
// objects) occludes the view.
TextureAtlas split_by_plane(const TextureAtlas& atlas, int planeId);

// Rasterizes the atlas mesh from an arbitrary camera and shades each pixel
// by bilinear lookup in its face's page. Pixels owned by no face, or by a
// face whose label came from no capture, get the sentinel color; when
// untexturedMask is given it receives 255 there and 0 elsewhere. Identical
// inputs give bit-identical output.
Image8 render_atlas_view(const TextureAtlas& atlas, const CameraIntrinsics& K,
                         const Mat4& camToWorld, Image8* untexturedMask = nullptr);

// render_atlas_view from the plane camera, bundled as a PlaneImage.
PlaneImage render_plane(int planeId, const TextureAtlas& atlas, const PlaneCamera& cam);

// Replaces a plane's triangulated-and-labeled patch with two triangles
// spanning the full rectangle, texcoords (0,0)..(1,1) matching render_plane's
// framing: rendering the quad textured with the plane image reproduces that
// image. Four vertices, faces {0,1,2} and {0,2,3}, faceLabels = planeId.
TriMesh simplify_and_remap(const PlaneGeometry& geom);

// "7", "floor", "ceiling" - used in filenames and the manifest.
std::string plane_name(int planeId);

// Writes plane_<name>.png and plane_<name>.mask.png into dir.
void save_plane_image(const PlaneImage& img, const std::string& dir);

// One manifest row per plane: geometry, image files, camera.
struct PlaneManifestEntry {
    PlaneGeometry geom;
    int imageW = 0, imageH = 0;
    double metersPerPixel = 1.0 / kPlanePixelsPerMeter;
    std::string imageFile, maskFile;
};

// planes.json in dir: every plane's rectangle, image size and files, and the
// camera placement, so later stages can work from images alone.
void save_planes_manifest(const std::vector<PlaneManifestEntry>& entries, const std::string& dir);
std::vector<PlaneManifestEntry> load_planes_manifest(const std::string& path);

}  // namespace roomtex
