"""Runtime verification of HyperLTL hyperproperties over finite traces."""
