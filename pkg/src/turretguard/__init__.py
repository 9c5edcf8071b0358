"""Turret and mobile Defender guarding a target against an Attacker."""
