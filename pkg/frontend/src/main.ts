import { Api } from "./api";
import { App } from "./app";
import { injectStyles } from "./styles";

injectStyles();
const root = document.getElementById("app");
if (root) {
  new App(root, new Api("")).start().catch((err) => {
    const banner = document.createElement("div");
    banner.className = "banner";
    banner.textContent = String(err);
    root.prepend(banner);
  });
}
