import { Client } from "./api.js";
import { App } from "./app.js";

declare global {
  interface Window {
    TASTEAUTH_BASE?: string;
  }
}

const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");

// same-origin by default; override for a service on another port
const app = new App(root, new Client(window.TASTEAUTH_BASE ?? ""));
app.start();
