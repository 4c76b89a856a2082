pub mod kn_oracle;
