"use strict";

(function () {
  fetch("https://collect.fixture.test/ingest", {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ page: location.pathname, t: 12345 }),
  });

  var xhr = new XMLHttpRequest();
  xhr.open("GET", "https://collect.fixture.test/poll?cursor=0");
  xhr.send();

  var ws = new WebSocket("wss://collect.fixture.test/live");
  ws.addEventListener("open", function () {
    ws.send("subscribe:latency");
    ws.close();
  });

  document.cookie = "viewpref=compact; path=/";
})();
