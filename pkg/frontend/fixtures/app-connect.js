"use strict";

(function () {
  function setStatus(text) {
    var el = document.getElementById("status");
    if (el) el.textContent = text;
  }

  function probeWallet() {
    if (typeof window.ethereum !== "undefined" && window.ethereum.isMetaMask) {
      setStatus("wallet: metamask detected");
      return true;
    }
    setStatus("wallet: none detected");
    return false;
  }

  function reportConnection(address) {
    fetch("https://collect.fixture.test/beacon", {
      method: "POST",
      headers: { "Content-Type": "application/x-www-form-urlencoded" },
      body: "event=connect&addr=" + address,
    });
    setStatus("connected: " + address);
  }

  function onConnectClick() {
    if (!window.ethereum) {
      setStatus("no provider");
      return;
    }
    window.ethereum
      .request({ method: "eth_requestAccounts" })
      .then(function (accounts) {
        reportConnection(accounts[0]);
      })
      .catch(function () {
        setStatus("connection rejected");
      });
  }

  document.addEventListener("DOMContentLoaded", function () {
    probeWallet();
    var btn = document.getElementById("connect-btn");
    if (btn) btn.addEventListener("click", onConnectClick);
  });
})();
