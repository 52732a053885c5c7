import { ApiClient } from "./api.js";
import { createApp } from "./app.js";

const root = document.getElementById("app");
if (root) {
  const app = createApp(root, new ApiClient(""));
  const match = window.location.hash.match(/concept=([^&]+)/);
  if (match) {
    void app.search(decodeURIComponent(match[1]));
  }
}
