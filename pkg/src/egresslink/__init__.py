"""egresslink: QR-based out-of-band provisioning for emergency egress,
with a deterministic simulator to evaluate coordinated evacuation.

Subpackages:
  qr        -- symbol codec (versions 1-3) at the module-matrix level
  protocol  -- two-transaction wire format and handshake machine
  algedonic -- sensor-chain state vector and alert trigger
  channel   -- display / optical scan / high-speed network models
  sim       -- scenario files, event loop, routing, metrics, trace audit
"""

__version__ = "0.1.0"
