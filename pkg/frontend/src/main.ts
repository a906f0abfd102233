/** Browser entry point: mount the viewer onto #app.
 *
 * The service origin defaults to the page's own origin; when the page is
 * served from a separate static file server, pass ?api=http://host:port.
 */

import { ApiClient } from "./api.js";
import { Viewer } from "./viewer.js";

const params = new URLSearchParams(window.location.search);
const base = params.get("api") ?? "";

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount point");
}

const viewer = new Viewer(root, new ApiClient(base));
viewer.init().catch((err) => {
  root.textContent = `failed to reach the refocus service: ${err}`;
});
