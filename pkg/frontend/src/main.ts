// Entry point: hash routing between the session list and one dashboard.

import { ConsoleApi } from "./api.js";
import { Dashboard, renderSessionList } from "./ui.js";

const api = new ConsoleApi("");

async function route(): Promise<void> {
  const root = document.getElementById("app")!;
  const match = window.location.hash.match(/^#\/sessions\/(.+)$/);
  if (match) {
    const dash = new Dashboard(root, api);
    await dash.load(match[1]);
    return;
  }
  const { sessions } = await api.listSessions();
  renderSessionList(root, sessions, (id) => {
    window.location.hash = `#/sessions/${id}`;
  });
}

window.addEventListener("hashchange", () => {
  void route();
});
void route();
